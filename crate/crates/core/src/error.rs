use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the supported physical regime.
    #[error("domain error: {0}")]
    Domain(String),
    /// A denominator or rank condition vanished within tolerance.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    /// An oracle's internal consistency check failed.
    #[error("oracle consistency failure: {0}")]
    Consistency(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
