use super::weights::init_weights;
use super::{AlgorithmKind, Run, Solution, SolveOptions};
use crate::error::SolveError;
use crate::flow::min_cut;
use crate::graph::{ConstraintSet, Workflow};
use crate::multicut::{min_multicut_exact, MulticutOptions, PathSet};
use crate::scalar::Scalar;

/// One weighted minimum cut per constraint, with weights refreshed from the
/// current graph before each cut.
pub fn remove_min_cuts<S: Scalar>(
    graph: &Workflow<S>,
    constraints: &ConstraintSet,
    opts: &SolveOptions,
) -> Result<Solution<S>, SolveError> {
    let mut run = Run::start(graph, constraints, opts)?;
    for &(s, t) in constraints.pairs() {
        run.check_clock()?;
        if !run.work.graph().reaches(s, t) {
            continue;
        }
        let weights = init_weights(run.work.graph(), run.work.valuations())?;
        let cut = min_cut(run.work.graph(), &weights, s, t)?;
        for e in cut.cut_edges {
            run.cut(e)?;
        }
    }
    Ok(run.finish(AlgorithmKind::RemoveMinCuts, None))
}

/// A single exact minimum multicut over all constraints, weighted once on
/// the input graph.
pub fn remove_min_mc<S: Scalar>(
    graph: &Workflow<S>,
    constraints: &ConstraintSet,
    opts: &SolveOptions,
) -> Result<Solution<S>, SolveError> {
    let mut run = Run::start(graph, constraints, opts)?;
    let weights = init_weights(run.work.graph(), run.work.valuations())?;
    let paths = PathSet::build_bounded(run.work.graph(), constraints, opts.path_budget)?;
    let mc_opts = MulticutOptions {
        path_budget: opts.path_budget,
        deadline: run.deadline,
    };
    let multicut = min_multicut_exact(&paths, &weights, &mc_opts)?;
    for e in multicut.edges {
        run.cut(e)?;
    }
    run.check_clock()?;
    Ok(run.finish(AlgorithmKind::RemoveMinMC, None))
}
