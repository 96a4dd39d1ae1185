use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// A covariance matrix failed the bona-fide check.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("unsupported protocol: {0}")]
    Unsupported(String),

    /// Threshold search found no sign change on the bracket.
    #[error("no root: {0}")]
    NoRoot(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("io error: {0}")]
    Io(String),
}

impl CoreError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}

impl From<csv::Error> for CoreError {
    fn from(e: csv::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}
