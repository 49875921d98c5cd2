use thiserror::Error;

use crate::complex::Face;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("face {0} is not present in the position")]
    FaceNotPresent(Face),

    #[error("complex has {faces} faces, above the face cap of {cap}")]
    TooLarge { faces: usize, cap: usize },

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported prime {0}; only 2 and 3 are handled")]
    UnsupportedPrime(u64),

    #[error("cannot parse family spec `{input}`: {reason}")]
    Parse { input: String, reason: String },

    /// The search stopped because the node budget or the table capacity ran out.
    #[error("resource exceeded: {0}")]
    ResourceExceeded(ResourceKind),

    #[error("operation requires a graph (faces of size at most 2)")]
    NotAGraph,

    #[error("involution has not been validated")]
    NotValidated,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("mirror discipline broken: {0}")]
    DisciplineBroken(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceKind {
    NodeBudget(u64),
    TableCapacity(usize),
}

impl std::fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResourceKind::NodeBudget(n) => write!(f, "node budget of {n} expanded states"),
            ResourceKind::TableCapacity(n) => write!(f, "transposition table capacity of {n} entries"),
        }
    }
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse { input: input.to_string(), reason: reason.into() }
    }

    pub fn is_resource_exceeded(&self) -> bool {
        matches!(self, Error::ResourceExceeded(_))
    }
}
