use thiserror::Error;

use crate::model::{Color, Vertex};

/// Everything that can go wrong while building, embedding or verifying.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("vertex {0} is not in the hypergraph")]
    UnknownVertex(Vertex),

    #[error("color {0} is outside 1..={1}")]
    UnknownColor(Color, usize),

    #[error("instance has no s-vector")]
    MissingS,

    #[error("bad subsets: {0}")]
    BadSubsets(String),

    #[error("degenerate denominator in bound: {0}")]
    DegenerateDenominator(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("corollary conditions violated: {}", .0.join("; "))]
    ConditionViolated(Vec<String>),

    #[error("input coloring is not a partial factorization: {0}")]
    NotPartialFactorization(String),

    #[error("greedy coloring stuck on edge {edge:?} with {alpha} copies of alpha")]
    ColoringStuck { edge: Vec<Vertex>, alpha: usize },

    #[error("capacity mismatch at vertex {vertex}: need {needed}, have {available}")]
    CapacityMismatch {
        vertex: Vertex,
        needed: u64,
        available: u64,
    },

    #[error("alpha^h budget for color {color} is negative ({value})")]
    NegativeBudget { color: Color, value: i128 },

    #[error("split step {0} has no fair solution")]
    FairnessInfeasible(usize),

    #[error("connectivity of class {color} not achieved after {retries} retries")]
    ConnectivityRepairExhausted { color: Color, retries: usize },

    #[error("connected-detachment criterion fails for class {color}: deg {degree} - wings {wings} < {needed}")]
    DetachmentCriterion {
        color: Color,
        degree: u64,
        wings: u64,
        needed: u64,
    },

    #[error("instance is not admissible: {0}")]
    NotAdmissible(String),

    #[error("colour budgets too small: {available} < {needed}")]
    BudgetInfeasible { available: u64, needed: u64 },

    #[error("necessary condition violated for class {color}: {reason}")]
    NecessityViolated { color: Color, reason: String },

    #[error("hypergraph is not connected: {0}")]
    NotConnected(String),

    #[error("vertex sets do not match: {0}")]
    VertexMismatch(String),

    #[error("oracle cap exceeded: {copies} edge copies > {cap}")]
    CapExceeded { copies: u64, cap: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("internal contract failure: {0}")]
    Contract(String),
}

impl Error {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NecessityViolated { .. } | Error::DetachmentCriterion { .. } => 2,
            Error::NotAdmissible(_)
            | Error::BudgetInfeasible { .. }
            | Error::ColoringStuck { .. }
            | Error::ConditionViolated(_)
            | Error::NotApplicable(_)
            | Error::NotPartialFactorization(_)
            | Error::NegativeBudget { .. } => 3,
            Error::FairnessInfeasible(_)
            | Error::ConnectivityRepairExhausted { .. }
            | Error::CapacityMismatch { .. }
            | Error::Contract(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
