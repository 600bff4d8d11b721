use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is numerically singular (|det| = {det:e}, threshold {threshold:e})")]
    SingularMatrix { det: f64, threshold: f64 },

    #[error("size limit exceeded: dimension {size} is above the enumeration limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("trajectory left the domain at step {step}: {message}")]
    DomainEscape { step: usize, message: String },

    #[error("horizon exhausted after {steps} steps: {message}")]
    HorizonExhausted { steps: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
