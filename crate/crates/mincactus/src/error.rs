//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("total edge weight exceeds the 2^62 cap")]
    WeightOverflow,
    #[error("cut side must be a proper nonempty subset of the vertices")]
    EmptyOrFullSide,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("hyperedge needs at least two distinct members")]
    HyperedgeTooSmall,
    #[error("source and sink sets overlap or are empty")]
    OverlappingTerminals,
    #[error("need at least {need} terminals, got {got}")]
    TooFewTerminals { need: usize, got: usize },
    #[error("too many terminals for brute-force enumeration (max {max}, got {got})")]
    TooManyTerminals { max: usize, got: usize },
    #[error("operation requires between 2 and 3 terminals, got {got}")]
    WrongSize { got: usize },
    #[error("terminal subset must be a proper nonempty subset of the mapped terminals")]
    InvalidSubset,
    #[error("unknown cactus node {0}")]
    UnknownNode(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("splits in a collection must be pairwise disjoint")]
    OverlappingSplits,
    #[error("anchor node is neither a leaf, a cycle member of degree 2, nor a hyperedge leaf")]
    AnchorNotLeaflike,
    #[error("a split exists where none was expected; upstream inputs are inconsistent")]
    SplitExists,
    #[error("only unit-weight insertions are supported")]
    WeightedInsertion,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
