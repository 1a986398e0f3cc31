use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A size guard was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Two routes that must agree did not.
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
