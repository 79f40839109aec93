use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Vectors that must share an outcome list (or an index set) do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A probability vector, spectrum or mixture measure violates its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A linear program that must be feasible for valid inputs was not.
    #[error("internal error: {0}")]
    Internal(String),

    /// Workspace ingestion failures carry their location.
    #[error("{location}: {reason}")]
    Data { location: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(reason: impl Into<String>) -> Self {
        Error::Domain(reason.into())
    }

    pub(crate) fn data(location: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Data {
            location: location.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
