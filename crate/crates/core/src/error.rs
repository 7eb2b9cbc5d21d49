use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The CLI maps [`Error::is_validation`] failures to exit code 1 and every
/// other failure to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input to {0}")]
    NanInput(&'static str),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("time interval must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid coupling: {0}")]
    Coupling(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("grid: {0}")]
    Grid(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NanInput(_)
                | Error::NonPositiveTime(_)
                | Error::Coupling(_)
                | Error::InvalidParameter(_)
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
