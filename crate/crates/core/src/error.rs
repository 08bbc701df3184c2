use thiserror::Error;

/// Errors surfaced by model construction, fitting and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("adjacency must be symmetric with entries in {{-1, 0, +1}}: {0}")]
    InvalidAdjacency(String),

    #[error("node {node} carries label {label}, but only {k} communities exist")]
    InvalidLabel { node: usize, label: usize, k: usize },

    #[error("community count {k} is invalid for {n} nodes")]
    InvalidCommunityCount { k: usize, n: usize },

    #[error("node {node} violates the feasibility constraints (margin {epsilon})")]
    InfeasibleParams { node: usize, epsilon: f64 },

    #[error("gauge fixing requires exactly 2 communities, got {0}")]
    GaugeRequiresTwoCommunities(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("graph has no edges")]
    NoEdges,

    #[error("truth matrix has zero Frobenius norm")]
    ZeroNormTruth,

    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
