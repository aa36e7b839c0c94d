use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the set of values the operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// An input violates a documented precondition (e.g. a mixed state where a pure one is required).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The request exceeds the dense full-space cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A numerical self-check failed.
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
