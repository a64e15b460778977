use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::hash::Hash;

use super::{AlgorithmKind, Run, Solution, SolveOptions};
use crate::error::SolveError;
use crate::graph::{ConstraintSet, Edge, VertexId, VertexKind, Workflow};
use crate::multicut::PathSet;
use crate::scalar::Scalar;

/// Set of universe indices. Fixed-width words keep hashing cheap.
trait Bits: Clone + Eq + Hash {
    fn empty(words: usize) -> Self;
    fn words(&self) -> &[u64];
    fn words_mut(&mut self) -> &mut [u64];

    fn has(&self, i: u32) -> bool {
        self.words()[i as usize / 64] >> (i % 64) & 1 == 1
    }

    fn with(&self, i: u32) -> Self {
        let mut out = self.clone();
        out.words_mut()[i as usize / 64] |= 1 << (i % 64);
        out
    }

    fn indices(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (w, &word) in self.words().iter().enumerate() {
            let mut x = word;
            while x != 0 {
                out.push(w as u32 * 64 + x.trailing_zeros());
                x &= x - 1;
            }
        }
        out
    }
}

impl<const W: usize> Bits for [u64; W] {
    fn empty(_: usize) -> Self {
        [0; W]
    }
    fn words(&self) -> &[u64] {
        self
    }
    fn words_mut(&mut self) -> &mut [u64] {
        self
    }
}

impl Bits for Box<[u64]> {
    fn empty(words: usize) -> Self {
        vec![0; words].into_boxed_slice()
    }
    fn words(&self) -> &[u64] {
        self
    }
    fn words_mut(&mut self) -> &mut [u64] {
        self
    }
}

/// Exhaustive search over unions of one-edge-per-path choices.
///
/// Candidates are built path by path and deduplicated as sets, so the
/// budget counts distinct removal sets. Ties go to the lexicographically
/// smallest removed set.
pub fn brute_force<S: Scalar>(
    graph: &Workflow<S>,
    constraints: &ConstraintSet,
    opts: &SolveOptions,
) -> Result<Solution<S>, SolveError> {
    let mut run = Run::start(graph, constraints, opts)?;
    let paths = PathSet::build_bounded(run.work.graph(), constraints, opts.path_budget)?;
    let universe: Vec<Edge> = paths.universe().iter().copied().collect();
    let best = match universe.len().div_ceil(64) {
        0 | 1 => search::<S, [u64; 1]>(&run, &paths, &universe, opts)?,
        2 => search::<S, [u64; 2]>(&run, &paths, &universe, opts)?,
        3 | 4 => search::<S, [u64; 4]>(&run, &paths, &universe, opts)?,
        5..=8 => search::<S, [u64; 8]>(&run, &paths, &universe, opts)?,
        _ => search::<S, Box<[u64]>>(&run, &paths, &universe, opts)?,
    };
    for c in best {
        run.cut(universe[c as usize])?;
    }
    Ok(run.finish(AlgorithmKind::BruteForce, None))
}

/// Returns the winning candidate as sorted universe indices.
fn search<S: Scalar, B: Bits>(
    run: &Run<S>,
    paths: &PathSet,
    universe: &[Edge],
    opts: &SolveOptions,
) -> Result<Vec<u32>, SolveError> {
    let index: BTreeMap<Edge, u32> = universe.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let words = universe.len().div_ceil(64).max(1);

    let mut candidates: HashSet<B> = HashSet::from([B::empty(words)]);
    let mut ticks = 0usize;
    for path in paths.paths() {
        let choices: Vec<u32> = path.iter().map(|e| index[e]).collect();
        let mut next = HashSet::with_capacity(candidates.len());
        for cand in &candidates {
            ticks += 1;
            if ticks.is_multiple_of(4096) {
                run.check_clock()?;
            }
            if choices.iter().any(|&c| cand.has(c)) {
                next.insert(cand.clone());
            }
            for &c in &choices {
                if !cand.has(c) {
                    next.insert(cand.with(c));
                }
            }
            if next.len() > opts.candidate_budget {
                return Err(SolveError::CandidateBudget { limit: opts.candidate_budget });
            }
        }
        candidates = next;
    }

    let eval = Evaluator::new(run.work.graph(), universe)?;
    let mut inflow = eval.scratch();
    let mut scored = Vec::with_capacity(candidates.len());
    for (i, cand) in candidates.iter().enumerate() {
        if i % 4096 == 4095 {
            run.check_clock()?;
        }
        scored.push((eval.utility(|r| cand.has(r), &mut inflow), cand));
    }
    let top = scored.iter().map(|&(u, _)| u).fold(S::zero(), S::max_of);
    Ok(scored
        .into_iter()
        .filter(|&(u, _)| S::approx_eq(u, top))
        .map(|(_, cand)| cand.indices())
        .min()
        .unwrap_or_default())
}

enum Source<S> {
    Fixed(S),
    Local(usize),
}

struct InEdge<S> {
    from: Source<S>,
    removable: Option<u32>,
}

/// Utility after removing a set of universe edges, recomputing only the
/// vertices downstream of the universe.
struct Evaluator<S> {
    /// Region vertices in topological order: in-edges and purpose weight.
    region: Vec<(Vec<InEdge<S>>, Option<S>)>,
    /// Utility contributed by purposes outside the region.
    outside: S,
}

impl<S: Scalar> Evaluator<S> {
    fn new(graph: &Workflow<S>, universe: &[Edge]) -> Result<Self, SolveError> {
        let pi = graph.propagate_valuations()?;
        let order = graph.topological_order()?;

        let mut in_region: BTreeSet<VertexId> = BTreeSet::new();
        for e in universe {
            if !in_region.contains(&e.dst) {
                in_region.extend(graph.descendants(e.dst));
            }
        }
        let local: BTreeMap<VertexId, usize> = order
            .iter()
            .filter(|v| in_region.contains(v))
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let removable: BTreeMap<Edge, u32> = universe.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();

        let mut region = Vec::with_capacity(local.len());
        let mut outside = S::zero();
        for &v in &order {
            let weight = (graph.kind(v) == Some(VertexKind::Purpose)).then(|| graph.purpose_weight(v));
            if !local.contains_key(&v) {
                if let Some(w) = weight {
                    outside += w * graph.inflow(&pi, v);
                }
                continue;
            }
            let ins = graph
                .in_edges(v)
                .map(|e| InEdge {
                    from: match local.get(&e.src) {
                        Some(&i) if graph.kind(e.src) != Some(VertexKind::UserData) => Source::Local(i),
                        _ => Source::Fixed(pi.value(e)),
                    },
                    removable: removable.get(&e).copied(),
                })
                .collect();
            region.push((ins, weight));
        }
        Ok(Evaluator { region, outside })
    }

    fn scratch(&self) -> Vec<S> {
        vec![S::zero(); self.region.len()]
    }

    fn utility(&self, gone: impl Fn(u32) -> bool, inflow: &mut [S]) -> S {
        let mut total = self.outside;
        for (i, (ins, weight)) in self.region.iter().enumerate() {
            let mut sum = S::zero();
            for e in ins {
                if e.removable.is_some_and(&gone) {
                    continue;
                }
                sum += match e.from {
                    Source::Fixed(x) => x,
                    Source::Local(j) => inflow[j],
                };
            }
            inflow[i] = sum;
            if let Some(w) = weight {
                total += *w * sum;
            }
        }
        total
    }
}
