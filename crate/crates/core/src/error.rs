use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("singular parameters: {0}")]
    Singular(String),

    #[error("unsupported construction: {0}")]
    UnsupportedConstruction(String),

    #[error("zero-norm input")]
    ZeroNorm,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FrameError>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(FrameError::Parameter(msg.into()))
}
