use thiserror::Error;

use crate::network::Edge;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("weight matrix is not square (row {row} has {len} entries, expected {n})")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("host graph needs at least 2 nodes, got {0}")]
    TooSmall(usize),
    #[error("host graph has {n} nodes; at most {max} are supported")]
    TooManyNodes { n: usize, max: usize },
    #[error("weights are asymmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("negative weight at ({0}, {1})")]
    NegativeWeight(usize, usize),
    #[error("nonzero diagonal entry at node {0}")]
    NonzeroDiagonal(usize),
    #[error("weight at ({0}, {1}) is infinite")]
    InfiniteWeight(usize, usize),
    #[error("negative scalar {0}")]
    NegativeScalar(String),
    #[error("edge price alpha must be positive and finite")]
    InvalidAlpha,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge {0:?} is not a valid pair over {1} nodes")]
    InvalidEdge(Edge, usize),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Edge),
    #[error("network has {got} nodes but host has {expected}")]
    NodeCountMismatch { expected: usize, got: usize },
    #[error("removed edge {0:?} is not present")]
    RemovalNotPresent(Edge),
    #[error("added edge {0:?} is already present")]
    AdditionAlreadyPresent(Edge),
    #[error("added edge {0:?} has an endpoint outside the coalition")]
    AdditionOutsideCoalition(Edge),
    #[error("removed edge {0:?} has no endpoint in the coalition")]
    RemovalOutsideCoalition(Edge),
    #[error("host is not metric")]
    NotMetric,
    #[error("alpha must exceed 1 for guided coalition moves")]
    AlphaTooSmall,
    #[error("instance with {n} nodes exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("optimum is heuristic, not proven")]
    NotProvenOptimal,
    #[error("alpha = {0} is not the square of a rational")]
    AlphaNotSquare(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no stable network found")]
    NoStableFound,
    #[error("exact integer kernel would overflow for this instance; use inexact mode")]
    ExactOverflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
