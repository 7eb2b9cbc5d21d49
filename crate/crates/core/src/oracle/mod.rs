//! Slow reference solvers: a grid integrator for the regularized
//! Schrödinger equation and direct quadrature against closed-form kernels.

pub mod certify;
pub mod grid;
pub mod propagate;
pub mod scatter;
pub mod tdse;

pub use certify::{certify, CertifyOptions, Certification, Scenario};
pub use grid::{relative_l2, Grid, GridSpec, GridState};
pub use propagate::quadrature_propagate;
pub use scatter::{scatter_two_level, ScatterRun, ScatterSetup};
pub use tdse::{evolve_tdse, Boundary, TdseRun};
