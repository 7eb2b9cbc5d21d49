//! Exact propagators for one-dimensional multilevel atoms crossing
//! zero-range laser beams, together with a grid-based time-dependent
//! Schrödinger solver used to cross-check them.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod dynamics;
pub mod error;
pub mod figures;
pub mod fixtures;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
