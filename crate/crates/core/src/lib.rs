//! Consent-respecting edge removal on data workflow DAGs.
//!
//! A [`Workflow`] models how user data flows through algorithms towards
//! business purposes. Each user opt-out is a `(user, purpose)` pair that must
//! end up disconnected; the solvers in [`algorithms`] remove edges so every
//! pair is cut while keeping as much weighted purpose utility as possible.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix the
//! scalar to `f64`, `f32`, or exact 64-bit rationals.

pub mod algorithms;
pub mod error;
pub mod flow;
pub mod generator;
pub mod graph;
pub mod multicut;
pub mod scalar;
pub mod schema;

use num_rational::Rational64;

pub use algorithms::{AlgorithmKind, Solution, SolveOptions};
pub use error::{GeneratorError, GraphError, SolveError};
pub use flow::Cut;
pub use graph::{ConstraintSet, Edge, EdgeMap, ReachabilitySubgraph, Rule, VertexId, VertexKind, Violation, Workflow};
pub use multicut::{Multicut, PathSet};
pub use scalar::Scalar;

pub type WorkflowGraph = Workflow<f64>;
pub type ValuationMap = EdgeMap<f64>;
pub type CapacityMap = EdgeMap<f64>;
pub type CutResult = Cut<f64>;
pub type MulticutSolution = Multicut<f64>;
pub type SolveResult = Solution<f64>;

pub type WorkflowGraph32 = Workflow<f32>;

pub type ExactWorkflowGraph = Workflow<Rational64>;
pub type ExactValuationMap = EdgeMap<Rational64>;
pub type ExactSolveResult = Solution<Rational64>;
