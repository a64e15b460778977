use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlgorithmKind, Run, Solution, SolveOptions};
use crate::error::SolveError;
use crate::graph::{ConstraintSet, Edge, Workflow};
use crate::scalar::Scalar;

/// Surviving paths are visited in lexicographic order; each one loses the
/// edge returned by `pick`. Paths broken by an earlier removal are skipped.
fn per_path<S, F>(
    graph: &Workflow<S>,
    constraints: &ConstraintSet,
    opts: &SolveOptions,
    mut pick: F,
) -> Result<Run<S>, SolveError>
where
    S: Scalar,
    F: FnMut(&[Edge]) -> Edge,
{
    let mut run = Run::start(graph, constraints, opts)?;
    for &(s, t) in constraints.pairs() {
        while let Some(path) = run.work.graph().first_path(s, t) {
            run.check_clock()?;
            run.cut(pick(&path))?;
        }
    }
    Ok(run)
}

/// Removes one uniformly random edge from every surviving constraint path.
pub fn remove_random_edge<S: Scalar>(
    graph: &Workflow<S>,
    constraints: &ConstraintSet,
    opts: &SolveOptions,
) -> Result<Solution<S>, SolveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let run = per_path(graph, constraints, opts, |path| path[rng.gen_range(0..path.len())])?;
    Ok(run.finish(AlgorithmKind::RemoveRandomEdge, Some(opts.seed)))
}

/// Removes the edge leaving the user vertex on every surviving constraint
/// path.
pub fn remove_first_edge<S: Scalar>(
    graph: &Workflow<S>,
    constraints: &ConstraintSet,
    opts: &SolveOptions,
) -> Result<Solution<S>, SolveError> {
    let run = per_path(graph, constraints, opts, |path| path[0])?;
    Ok(run.finish(AlgorithmKind::RemoveFirstEdge, None))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::branch;
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn first_edge_on_branch_loses_everything() {
        let (g, [v1, v2, v3, _]) = branch(2.0);
        let n = ConstraintSet::from_pairs([(v1, v3)]).unwrap();
        let sol = remove_first_edge(&g, &n, &SolveOptions::default()).unwrap();
        assert_eq!(sol.removed, vec![Edge { src: v1, dst: v2 }]);
        assert_eq!(sol.utility, 0.0);
        assert!(sol.graph.is_feasible(&n).unwrap());
    }

    #[test]
    fn some_seed_keeps_the_other_branch() {
        let (g, [v1, v2, v3, _]) = branch(2.0);
        let n = ConstraintSet::from_pairs([(v1, v3)]).unwrap();
        let late = Edge { src: v2, dst: v3 };
        let hit = (0..64)
            .map(|seed| remove_random_edge(&g, &n, &SolveOptions::with_seed(seed)).unwrap())
            .find(|sol| sol.removed == vec![late])
            .expect("one of 64 seeds picks the second edge");
        assert_eq!(hit.utility, 2.0);
    }

    #[test]
    fn random_is_reproducible_and_feasible() {
        let g = fan(2.0, 1.0);
        let n = ConstraintSet::from_pairs([(S1, T1), (S1, T2), (S2, T1)]).unwrap();
        for seed in 0..20 {
            let a = remove_random_edge(&g, &n, &SolveOptions::with_seed(seed)).unwrap();
            let b = remove_random_edge(&g, &n, &SolveOptions::with_seed(seed)).unwrap();
            assert_eq!(a.removed, b.removed);
            assert_eq!(a.seed, Some(seed));
            assert!(a.graph.is_feasible(&n).unwrap());
        }
    }

    #[test]
    fn first_edge_on_fan() {
        let g = fan(2.0, 1.0);
        let n = ConstraintSet::from_pairs([(S1, T1)]).unwrap();
        let sol = remove_first_edge(&g, &n, &SolveOptions::default()).unwrap();
        assert_eq!(sol.removed, vec![Edge { src: S1, dst: V1 }]);
        assert_eq!(sol.utility, 2.0);
    }

    #[test]
    fn feasible_input_is_untouched() {
        let (g, n) = super::super::test_support::two_chains();
        for sol in [
            remove_first_edge(&g, &n, &SolveOptions::default()).unwrap(),
            remove_random_edge(&g, &n, &SolveOptions::with_seed(3)).unwrap(),
        ] {
            assert!(sol.removed.is_empty());
            assert_eq!(sol.graph, g);
            assert_eq!(sol.utility, 2.0);
        }
    }
}
