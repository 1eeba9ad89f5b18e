use thiserror::Error;

/// Errors surfaced by the library. Check failures are not errors; they are
/// reported through [`crate::seqfn::CheckReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} exceeds the evaluation cap {cap}")]
    CapOverflow { index: u64, cap: u64 },

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
