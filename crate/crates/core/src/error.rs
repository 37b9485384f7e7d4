use thiserror::Error;

/// Errors reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("accuracy target not reached: {0}")]
    Accuracy(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
