use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated an operation precondition (bad mode, index, shape, parameter).
    #[error("usage error: {0}")]
    Usage(String),
    /// Input is well-formed but the requested quantity is undefined for it.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("malformed tensor file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
