use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathieuError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    /// Series did not settle before its cap; carries the magnitude of the last term.
    #[error("truncation error: {what} (last term {last_term:e})")]
    Truncation { what: String, last_term: f64 },
    #[error("precision error: {0}")]
    Precision(String),
    #[error("singularity: {0}")]
    Singularity(String),
}

pub type Result<T> = std::result::Result<T, MathieuError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MathieuError::Domain(msg.into()))
}
