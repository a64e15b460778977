use thiserror::Error;

use crate::graph::{Edge, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cycle detected through vertex {0}")]
    CycleThrough(VertexId),
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("vertex {0} is not a purpose vertex")]
    NotPurpose(VertexId),
    #[error("vertex {0} is not a user data vertex")]
    NotUserData(VertexId),
    #[error("edge {0} does not exist")]
    UnknownEdge(Edge),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("edge {0} already exists")]
    DuplicateEdge(Edge),
    #[error("constraint ({0}, {1}) listed twice")]
    DuplicateConstraint(VertexId, VertexId),
    #[error("source and sink are the same vertex {0}")]
    SameEndpoints(VertexId),
    #[error("more than {limit} paths between constraint endpoints")]
    PathLimit { limit: usize },
}

/// Failures of the exact multicut and brute-force searches.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("path budget exceeded: more than {limit} constraint paths")]
    PathBudget { limit: usize },
    #[error("candidate budget exceeded: more than {limit} distinct candidate removals")]
    CandidateBudget { limit: usize },
    #[error("deadline reached before the solver finished")]
    Timeout,
    #[error("graph is not a valid workflow: {0}")]
    InvalidGraph(String),
}

impl SolveError {
    pub fn is_budget(&self) -> bool {
        matches!(self, SolveError::PathBudget { .. } | SolveError::CandidateBudget { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("distribution has {got} entries but the workflow has {stages} stages")]
    DistributionLength { got: usize, stages: usize },
    #[error("distribution must be non-negative and sum to 1 (sum is {0})")]
    DistributionSum(String),
    #[error("need at least 2 stages, got {0}")]
    TooFewStages(usize),
    #[error("stage {stage} has no vertices")]
    EmptyStage { stage: usize },
    #[error("density {0} is outside [0, 1]")]
    Density(String),
    #[error("{requested} constraints requested but only {available} user/purpose pairs exist")]
    TooManyConstraints { requested: usize, available: usize },
    #[error("need at least one constraint")]
    NoConstraints,
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("the non-uniform distribution is only defined for 5 stages")]
    NonUniformStages,
}
