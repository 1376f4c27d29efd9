//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector had a different dimension than the object it was used with.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An argument violated a documented precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Query/update calls arrived out of order.
    #[error("lifecycle violation: {0}")]
    LifecycleViolation(String),

    /// More trials were played than the declared horizon allows.
    #[error("horizon exhausted: trial {trial} exceeds horizon {horizon}")]
    HorizonExhausted { trial: usize, horizon: usize },

    /// The meta-algorithm requires a power-of-two horizon.
    #[error("horizon {0} is not a power of two")]
    NotPowerOfTwo(usize),

    /// A segment or segmentation was malformed.
    #[error("invalid segment: {0}")]
    InvalidSegment(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }

    pub(crate) fn lifecycle(msg: impl Into<String>) -> Self {
        Error::LifecycleViolation(msg.into())
    }

    pub(crate) fn segment(msg: impl Into<String>) -> Self {
        Error::InvalidSegment(msg.into())
    }
}
