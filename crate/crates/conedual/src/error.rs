use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConeDualError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear program error: {0}")]
    Lp(#[from] crate::lp::LpError),

    #[error("internal soundness violation: {0}")]
    Soundness(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
