use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance too large for {what}: {size} exceeds limit {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("search cap exceeded: {0}")]
    SearchCap(String),

    #[error("search timed out")]
    Timeout,

    #[error("step limit of {0} exceeded")]
    StepLimit(usize),

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
