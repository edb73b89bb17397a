use std::fmt;

use thiserror::Error;

/// Which kind of bound a construction needed but could not find.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Meet,
    Join,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::Meet => f.write_str("meet"),
            BoundKind::Join => f.write_str("join"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    Invalid(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("necessary condition fails: {0}")]
    Condition(String),

    #[error("no {kind} for subset {subset:?} of the range; try completing the poset first")]
    MissingBound { kind: BoundKind, subset: Vec<String> },

    #[error("not distributive: ({0}, {1}, {2})")]
    NotDistributive(String, String, String),

    #[error("operation rejected: {0}")]
    Rejected(String),

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("internal check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
