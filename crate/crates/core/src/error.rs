use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A landmark configuration breaks one of the structural constraints
    /// (too few landmarks, adjacent landmarks, malformed labels).
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("sampler initialization failed: {0}")]
    Initialization(String),

    #[error("data generation failed: {0}")]
    Generation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn constraint(msg: impl Into<String>) -> Self {
        Error::ConstraintViolation(msg.into())
    }
}
