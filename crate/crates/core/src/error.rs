use thiserror::Error;

/// Errors produced by grid construction, sampling and the operator kernels.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("sampling produced a non-finite value at cell ({i1}, {i2}): {value}")]
    SamplingError { i1: usize, i2: usize, value: f64 },

    #[error("evaluation error: {0}")]
    EvaluationError(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidArgument(msg.into())
    }
}
