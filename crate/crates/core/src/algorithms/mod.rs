//! The five edge-removal solvers and the shared edge weighting.
//!
//! Every solver returns a feasible [`Solution`]: no constraint pair stays
//! connected. They differ in how they pick the edges to cut:
//!
//! | kind                | choice                                                 |
//! |---------------------|--------------------------------------------------------|
//! | `RemoveRandomEdge`  | a uniformly random edge of each surviving path         |
//! | `RemoveFirstEdge`   | the edge leaving the user vertex on each surviving path |
//! | `RemoveMinCuts`     | one weighted minimum cut per constraint, in order      |
//! | `RemoveMinMC`       | one weighted minimum multicut over all constraints     |
//! | `BruteForce`        | best union of one-edge-per-path choices                |

mod brute_force;
mod heuristics;
mod min_cuts;
mod weights;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::graph::{ConstraintSet, Edge, Working, Workflow};
use crate::multicut::DEFAULT_PATH_BUDGET;
use crate::scalar::Scalar;

pub use brute_force::brute_force;
pub use heuristics::{remove_first_edge, remove_random_edge};
pub use min_cuts::{remove_min_cuts, remove_min_mc};
pub use weights::{init_weights, reach_weights};

pub const DEFAULT_CANDIDATE_BUDGET: usize = 1_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    RemoveRandomEdge,
    RemoveFirstEdge,
    RemoveMinCuts,
    #[serde(rename = "remove-min-mc")]
    RemoveMinMC,
    BruteForce,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::RemoveRandomEdge,
        AlgorithmKind::RemoveFirstEdge,
        AlgorithmKind::RemoveMinCuts,
        AlgorithmKind::RemoveMinMC,
        AlgorithmKind::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::RemoveRandomEdge => "remove-random-edge",
            AlgorithmKind::RemoveFirstEdge => "remove-first-edge",
            AlgorithmKind::RemoveMinCuts => "remove-min-cuts",
            AlgorithmKind::RemoveMinMC => "remove-min-mc",
            AlgorithmKind::BruteForce => "brute-force",
        }
    }

    pub fn is_randomized(self) -> bool {
        self == AlgorithmKind::RemoveRandomEdge
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Seed for `RemoveRandomEdge`; ignored by the others.
    pub seed: u64,
    /// Maximum number of constraint paths `RemoveMinMC` and `BruteForce`
    /// will enumerate.
    pub path_budget: usize,
    /// Maximum number of distinct candidate removal sets `BruteForce` will
    /// materialize.
    pub candidate_budget: usize,
    /// Wall-clock limit for one solve.
    pub timeout: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            path_budget: DEFAULT_PATH_BUDGET,
            candidate_budget: DEFAULT_CANDIDATE_BUDGET,
            timeout: None,
        }
    }
}

impl SolveOptions {
    pub fn with_seed(seed: u64) -> Self {
        SolveOptions { seed, ..Self::default() }
    }
}

/// A consented subgraph and how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<S> {
    pub graph: Workflow<S>,
    /// Edges the solver chose to cut, in removal order.
    pub removed: Vec<Edge>,
    /// Edges dropped afterwards because their valuation fell to zero.
    pub cascaded: Vec<Edge>,
    pub utility: S,
    pub runtime: Duration,
    pub algorithm: AlgorithmKind,
    pub seed: Option<u64>,
}

impl<S: Scalar> Solution<S> {
    pub fn runtime_ms(&self) -> f64 {
        self.runtime.as_secs_f64() * 1e3
    }
}

/// Runs `kind` on `graph`.
pub fn solve<S: Scalar>(
    kind: AlgorithmKind,
    graph: &Workflow<S>,
    constraints: &ConstraintSet,
    opts: &SolveOptions,
) -> Result<Solution<S>, SolveError> {
    match kind {
        AlgorithmKind::RemoveRandomEdge => remove_random_edge(graph, constraints, opts),
        AlgorithmKind::RemoveFirstEdge => remove_first_edge(graph, constraints, opts),
        AlgorithmKind::RemoveMinCuts => remove_min_cuts(graph, constraints, opts),
        AlgorithmKind::RemoveMinMC => remove_min_mc(graph, constraints, opts),
        AlgorithmKind::BruteForce => brute_force(graph, constraints, opts),
    }
}

fn check_inputs<S: Scalar>(graph: &Workflow<S>, constraints: &ConstraintSet) -> Result<(), SolveError> {
    if let Some(v) = graph.validate().first() {
        return Err(SolveError::InvalidGraph(v.to_string()));
    }
    constraints.check_against(graph)?;
    Ok(())
}

/// Bookkeeping shared by the solvers: the working graph, what was cut, and
/// the clock.
pub(crate) struct Run<S> {
    work: Working<S>,
    removed: Vec<Edge>,
    cascaded: Vec<Edge>,
    started: Instant,
    deadline: Option<Instant>,
}

impl<S: Scalar> Run<S> {
    fn start(graph: &Workflow<S>, constraints: &ConstraintSet, opts: &SolveOptions) -> Result<Self, SolveError> {
        check_inputs(graph, constraints)?;
        let started = Instant::now();
        let deadline = opts.timeout.map(|t| started + t);
        Ok(Run {
            work: Working::new(graph.clone())?,
            removed: Vec::new(),
            cascaded: Vec::new(),
            started,
            deadline,
        })
    }

    fn check_clock(&self) -> Result<(), SolveError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(SolveError::Timeout),
            _ => Ok(()),
        }
    }

    /// Cuts `e` unless an earlier cascade already removed it.
    fn cut(&mut self, e: Edge) -> Result<(), SolveError> {
        if self.work.has_edge(e) {
            let dropped = self.work.remove(e)?;
            self.removed.push(e);
            self.cascaded.extend(dropped);
        }
        Ok(())
    }

    fn finish(self, algorithm: AlgorithmKind, seed: Option<u64>) -> Solution<S> {
        let utility = self.work.utility();
        let runtime = self.started.elapsed();
        let (graph, _) = self.work.into_parts();
        Solution {
            graph,
            removed: self.removed,
            cascaded: self.cascaded,
            utility,
            runtime,
            algorithm,
            seed,
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::graph::VertexId;

    /// One user, one algorithm, two purposes; `a` on the only user edge.
    pub fn branch(a: f64) -> (Workflow<f64>, [VertexId; 4]) {
        let mut g = Workflow::new();
        let v1 = g.add_user(1).unwrap();
        let v2 = g.add_algorithm(2).unwrap();
        let v3 = g.add_purpose(3, 1.0).unwrap();
        let v4 = g.add_purpose(4, 1.0).unwrap();
        g.add_edge_valued(v1, v2, a).unwrap();
        g.add_edge(v2, v3).unwrap();
        g.add_edge(v2, v4).unwrap();
        (g, [v1, v2, v3, v4])
    }

    /// Two disjoint user-algorithm-purpose chains, `0 -> 1 -> 2` and
    /// `3 -> 4 -> 5`. The constraint `(0, 5)` holds already.
    pub fn two_chains() -> (Workflow<f64>, ConstraintSet) {
        let mut g = Workflow::new();
        for base in [0, 3] {
            let u = g.add_user(base).unwrap();
            let a = g.add_algorithm(base + 1).unwrap();
            let p = g.add_purpose(base + 2, 1.0).unwrap();
            g.add_edge(u, a).unwrap();
            g.add_edge(a, p).unwrap();
        }
        let n = ConstraintSet::from_pairs([(VertexId(0), VertexId(5))]).unwrap();
        (g, n)
    }
}
