//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A configuration parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A time step was rejected by the drift monitor.
    #[error("step rejected: {0}")]
    StepRejected(String),
    /// Reading or writing a serialized artifact failed.
    #[error("i/o: {0}")]
    Io(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
