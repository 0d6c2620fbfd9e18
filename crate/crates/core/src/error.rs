use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("weight vector length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("fixed-point overflow while adding weights")]
    Overflow,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("resource ceiling exceeded: {what} (limit {limit})")]
    ResourceCeiling { what: &'static str, limit: u64 },

    #[error("path enumeration refused: complete-multigraph bound {bound} exceeds ceiling {ceiling}")]
    EnumerationCeiling { bound: BigUint, ceiling: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for refusals caused by a configured resource limit.
    pub fn is_ceiling(&self) -> bool {
        matches!(
            self,
            Error::ResourceCeiling { .. } | Error::EnumerationCeiling { .. }
        )
    }
}
