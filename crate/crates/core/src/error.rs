use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("order violation: {0}")]
    Order(#[from] crate::poset::OrderViolation),

    #[error("resource limit exceeded: {what} ({actual} > {limit})")]
    Resource {
        what: &'static str,
        actual: u128,
        limit: u128,
    },

    #[error("conflicting facts for {term}: {existing} (from {existing_citation}) vs {new} (from {new_citation})")]
    Conflict {
        term: String,
        existing: u64,
        existing_citation: String,
        new: u64,
        new_citation: String,
    },

    #[error("inconsistent exact sequence: {0}")]
    Inconsistent(String),

    #[error("cannot derive {goal}: unresolved terms {blocking:?}")]
    Underdetermined { goal: String, blocking: Vec<String> },

    #[error("derivation failed: {0}")]
    DerivationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
