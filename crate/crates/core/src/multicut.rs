//! Minimum multicut over constraint paths.
//!
//! An edge set disconnects `s` from `t` iff it hits every `s → t` path, so a
//! minimum multicut is a minimum-weight hitting set over the union of all
//! constraint paths. The solver is an exact branch and bound:
//!
//! 1. find the optimum weight, branching on the uncovered path whose
//!    cheapest edge is heaviest, bounded by disjoint-path and greedy
//!    dual-packing lower bounds, seeded with a greedy incumbent;
//! 2. walk the search space in lexicographic order of sorted edge sets with
//!    that weight as a hard bound; the first hitting set found is the
//!    lexicographically smallest optimum.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use crate::error::{GraphError, SolveError};
use crate::graph::{ConstraintSet, Edge, EdgeMap, Workflow};
use crate::scalar::Scalar;

pub const DEFAULT_PATH_BUDGET: usize = 10_000;

/// Every simple path of every constraint pair, as edge lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathSet {
    paths: Vec<Vec<Edge>>,
    universe: BTreeSet<Edge>,
}

impl PathSet {
    pub fn build<S: Scalar>(graph: &Workflow<S>, constraints: &ConstraintSet) -> Self {
        Self::collect(graph, constraints, None).expect("no limit")
    }

    /// Fails with [`SolveError::PathBudget`] once more than `limit` paths
    /// have been found.
    pub fn build_bounded<S: Scalar>(graph: &Workflow<S>, constraints: &ConstraintSet, limit: usize) -> Result<Self, SolveError> {
        Self::collect(graph, constraints, Some(limit)).map_err(|e| match e {
            GraphError::PathLimit { limit } => SolveError::PathBudget { limit },
            other => SolveError::Graph(other),
        })
    }

    fn collect<S: Scalar>(graph: &Workflow<S>, constraints: &ConstraintSet, limit: Option<usize>) -> Result<Self, GraphError> {
        let mut paths = Vec::new();
        for &(s, t) in constraints.pairs() {
            let left = limit.map(|l| l.saturating_sub(paths.len()));
            match graph.paths_between(s, t, left) {
                Ok(found) => paths.extend(found),
                Err(GraphError::PathLimit { .. }) => {
                    return Err(GraphError::PathLimit { limit: limit.expect("limited") })
                }
                Err(e) => return Err(e),
            }
        }
        let universe = paths.iter().flatten().copied().collect();
        Ok(PathSet { paths, universe })
    }

    pub fn from_paths(paths: Vec<Vec<Edge>>) -> Self {
        let universe = paths.iter().flatten().copied().collect();
        PathSet { paths, universe }
    }

    pub fn paths(&self) -> &[Vec<Edge>] {
        &self.paths
    }

    pub fn universe(&self) -> &BTreeSet<Edge> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// True if every path contains at least one edge of `cut`.
    pub fn is_hit_by(&self, cut: &BTreeSet<Edge>) -> bool {
        self.paths.iter().all(|p| p.iter().any(|e| cut.contains(e)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multicut<S> {
    pub edges: BTreeSet<Edge>,
    pub weight: S,
    pub optimal: bool,
}

#[derive(Clone, Debug)]
pub struct MulticutOptions {
    pub path_budget: usize,
    pub deadline: Option<Instant>,
}

impl Default for MulticutOptions {
    fn default() -> Self {
        MulticutOptions { path_budget: DEFAULT_PATH_BUDGET, deadline: None }
    }
}

/// Minimum-weight set of universe edges hitting every path; ties go to the
/// lexicographically smallest sorted edge list.
pub fn min_multicut_exact<S: Scalar>(instance: &PathSet, weights: &EdgeMap<S>, opts: &MulticutOptions) -> Result<Multicut<S>, SolveError> {
    if instance.len() > opts.path_budget {
        return Err(SolveError::PathBudget { limit: opts.path_budget });
    }
    let hs = HittingSet::new(instance, weights);
    let chosen = hs.solve(opts.deadline)?;
    let edges: BTreeSet<Edge> = chosen.iter().map(|&i| hs.elements[i]).collect();
    let weight = edges.iter().map(|&e| weights.value(e)).sum();
    Ok(Multicut { edges, weight, optimal: true })
}

struct HittingSet<S> {
    /// Universe edges; index order equals edge order.
    elements: Vec<Edge>,
    weight: Vec<S>,
    /// Sets to hit, each a sorted list of element indices. Supersets of
    /// other sets are dropped since hitting the subset suffices.
    sets: Vec<Vec<usize>>,
    /// For each element, the sets containing it.
    member_of: Vec<Vec<usize>>,
    slack: S,
}

struct Clock {
    deadline: Option<Instant>,
    ticks: u32,
}

impl Clock {
    fn tick(&mut self) -> Result<(), SolveError> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(64) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(SolveError::Timeout);
                }
            }
        }
        Ok(())
    }
}

/// Per-element status during a search.
#[derive(Copy, Clone, PartialEq, Eq)]
enum Mark {
    Free,
    In,
    Out,
}

struct State<S> {
    mark: Vec<Mark>,
    /// How many chosen elements hit each set.
    hits: Vec<u32>,
    uncovered: usize,
    cost: S,
}

impl<S: Scalar> HittingSet<S> {
    fn new(instance: &PathSet, weights: &EdgeMap<S>) -> Self {
        let elements: Vec<Edge> = instance.universe().iter().copied().collect();
        let weight: Vec<S> = elements.iter().map(|&e| weights.value(e)).collect();
        let mut sets: Vec<Vec<usize>> = instance
            .paths()
            .iter()
            .map(|p| {
                let mut s: Vec<usize> = p
                    .iter()
                    .map(|e| elements.binary_search(e).expect("edge in universe"))
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        sets.dedup();
        let mut kept: Vec<Vec<usize>> = Vec::with_capacity(sets.len());
        let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); elements.len()];
        for s in sets {
            // s is not a superset of a kept set iff no kept set lies inside it
            let dominated = {
                let mut candidates: HashSet<usize> = HashSet::new();
                for &i in &s {
                    candidates.extend(member_of[i].iter().copied());
                }
                candidates.into_iter().any(|k| kept[k].iter().all(|i| s.binary_search(i).is_ok()))
            };
            if !dominated {
                for &i in &s {
                    member_of[i].push(kept.len());
                }
                kept.push(s);
            }
        }
        let total: S = weight.iter().copied().sum();
        HittingSet { elements, weight, sets: kept, member_of, slack: S::slack(total) }
    }

    fn fresh(&self) -> State<S> {
        State {
            mark: vec![Mark::Free; self.elements.len()],
            hits: vec![0; self.sets.len()],
            uncovered: self.sets.len(),
            cost: S::zero(),
        }
    }

    fn include(&self, st: &mut State<S>, i: usize) {
        st.mark[i] = Mark::In;
        st.cost += self.weight[i];
        for &k in &self.member_of[i] {
            if st.hits[k] == 0 {
                st.uncovered -= 1;
            }
            st.hits[k] += 1;
        }
    }

    fn uninclude(&self, st: &mut State<S>, i: usize) {
        st.mark[i] = Mark::Free;
        st.cost -= self.weight[i];
        for &k in &self.member_of[i] {
            st.hits[k] -= 1;
            if st.hits[k] == 0 {
                st.uncovered += 1;
            }
        }
    }

    /// Lower bound on the extra cost needed to hit every uncovered set using
    /// elements accepted by `allowed`. `None` if some set cannot be hit.
    fn lower_bound(&self, st: &State<S>, allowed: impl Fn(usize) -> bool) -> Option<S> {
        let mut residual: Vec<Option<S>> = vec![None; self.elements.len()];
        let mut used = vec![false; self.elements.len()];
        let mut packing = S::zero();
        let mut disjoint = S::zero();
        for (k, set) in self.sets.iter().enumerate() {
            if st.hits[k] > 0 {
                continue;
            }
            let mut any = false;
            let mut min_res: Option<S> = None;
            let mut min_w: Option<S> = None;
            let mut clash = false;
            for &i in set {
                if !allowed(i) {
                    continue;
                }
                any = true;
                let r = residual[i].unwrap_or(self.weight[i]);
                min_res = Some(min_res.map_or(r, |m| S::min_of(m, r)));
                min_w = Some(min_w.map_or(self.weight[i], |m| S::min_of(m, self.weight[i])));
                clash |= used[i];
            }
            if !any {
                return None;
            }
            let y = min_res.expect("any");
            if y > S::zero() {
                packing += y;
                for &i in set {
                    if allowed(i) {
                        residual[i] = Some(residual[i].unwrap_or(self.weight[i]) - y);
                    }
                }
            }
            if !clash {
                disjoint += min_w.expect("any");
                for &i in set {
                    if allowed(i) {
                        used[i] = true;
                    }
                }
            }
        }
        Some(S::max_of(packing, disjoint))
    }

    fn solve(&self, deadline: Option<Instant>) -> Result<Vec<usize>, SolveError> {
        if self.sets.is_empty() {
            return Ok(Vec::new());
        }
        let mut clock = Clock { deadline, ticks: 0 };
        let greedy = self.greedy();
        let mut best_cost: S = greedy.iter().map(|&i| self.weight[i]).sum();
        let mut st = self.fresh();
        self.optimum(&mut st, &mut best_cost, &mut clock)?;
        self.lexicographic(best_cost, &mut clock)
    }

    /// Greedy cover by hits-per-weight, then drop redundant elements.
    fn greedy(&self) -> Vec<usize> {
        let mut st = self.fresh();
        let mut chosen = Vec::new();
        while st.uncovered > 0 {
            let mut best: Option<(usize, usize)> = None;
            for i in 0..self.elements.len() {
                if st.mark[i] != Mark::Free {
                    continue;
                }
                let gain = self.member_of[i].iter().filter(|&&k| st.hits[k] == 0).count();
                if gain == 0 {
                    continue;
                }
                best = match best {
                    None => Some((i, gain)),
                    Some((j, g)) => {
                        // gain_i / w_i > g / w_j  <=>  gain_i * w_j > g * w_i
                        let lhs = S::from_usize(gain).expect("count") * self.weight[j];
                        let rhs = S::from_usize(g).expect("count") * self.weight[i];
                        if lhs > rhs {
                            Some((i, gain))
                        } else {
                            Some((j, g))
                        }
                    }
                };
            }
            let (i, _) = best.expect("uncovered set has a free element");
            self.include(&mut st, i);
            chosen.push(i);
        }
        chosen.sort_by(|&a, &b| self.weight[b].partial_cmp(&self.weight[a]).expect("comparable").then(a.cmp(&b)));
        let mut kept = Vec::new();
        for i in chosen {
            let redundant = self.member_of[i].iter().all(|&k| st.hits[k] > 1);
            if redundant {
                self.uninclude(&mut st, i);
            } else {
                kept.push(i);
            }
        }
        kept.sort_unstable();
        kept
    }

    /// Lowers `best` to the optimum weight.
    fn optimum(&self, st: &mut State<S>, best: &mut S, clock: &mut Clock) -> Result<(), SolveError> {
        clock.tick()?;
        if st.uncovered == 0 {
            if st.cost < *best {
                *best = st.cost;
            }
            return Ok(());
        }
        let lb = match self.lower_bound(st, |i| st.mark[i] == Mark::Free) {
            Some(lb) => lb,
            None => return Ok(()),
        };
        if st.cost + lb >= *best - self.slack {
            return Ok(());
        }
        let branch = self.branching_set(st);
        let mut options: Vec<usize> = self.sets[branch].iter().copied().filter(|&i| st.mark[i] == Mark::Free).collect();
        options.sort_by(|&a, &b| self.weight[a].partial_cmp(&self.weight[b]).expect("comparable").then(a.cmp(&b)));
        let mut excluded = Vec::new();
        for i in options {
            self.include(st, i);
            let r = self.optimum(st, best, clock);
            self.uninclude(st, i);
            r?;
            st.mark[i] = Mark::Out;
            excluded.push(i);
        }
        for i in excluded {
            st.mark[i] = Mark::Free;
        }
        Ok(())
    }

    /// Uncovered set whose cheapest free element is most expensive; ties go
    /// to fewer free elements, then lower index.
    fn branching_set(&self, st: &State<S>) -> usize {
        let mut best: Option<(usize, S, usize)> = None;
        for (k, set) in self.sets.iter().enumerate() {
            if st.hits[k] > 0 {
                continue;
            }
            let free: Vec<usize> = set.iter().copied().filter(|&i| st.mark[i] == Mark::Free).collect();
            let cheapest = free.iter().map(|&i| self.weight[i]).reduce(S::min_of).expect("bound checked");
            let better = match best {
                None => true,
                Some((_, w, n)) => cheapest > w || (cheapest == w && free.len() < n),
            };
            if better {
                best = Some((k, cheapest, free.len()));
            }
        }
        best.expect("some set uncovered").0
    }

    /// Fixes elements in index order, taking each one whenever some hitting
    /// set within `target` still extends the choice. The result is the
    /// lexicographically smallest such set.
    fn lexicographic(&self, target: S, clock: &mut Clock) -> Result<Vec<usize>, SolveError> {
        let mut st = self.fresh();
        for i in 0..self.elements.len() {
            if st.uncovered == 0 {
                break;
            }
            let useful = self.member_of[i].iter().any(|&k| st.hits[k] == 0);
            if useful || self.weight[i].is_zero() {
                self.include(&mut st, i);
                if self.completes_within(&mut st, target, clock)? {
                    continue;
                }
                self.uninclude(&mut st, i);
            }
            st.mark[i] = Mark::Out;
        }
        debug_assert_eq!(st.uncovered, 0);
        Ok((0..self.elements.len()).filter(|&j| st.mark[j] == Mark::In).collect())
    }

    /// Whether free elements can complete `st` to a hitting set of cost at
    /// most `limit`.
    fn completes_within(&self, st: &mut State<S>, limit: S, clock: &mut Clock) -> Result<bool, SolveError> {
        clock.tick()?;
        if st.uncovered == 0 {
            return Ok(st.cost <= limit + self.slack);
        }
        let lb = match self.lower_bound(st, |i| st.mark[i] == Mark::Free) {
            Some(lb) => lb,
            None => return Ok(false),
        };
        if st.cost + lb > limit + self.slack {
            return Ok(false);
        }
        let branch = self.branching_set(st);
        let mut options: Vec<usize> = self.sets[branch].iter().copied().filter(|&i| st.mark[i] == Mark::Free).collect();
        options.sort_by(|&a, &b| self.weight[a].partial_cmp(&self.weight[b]).expect("comparable").then(a.cmp(&b)));
        let mut excluded = Vec::new();
        let mut found = false;
        for i in options {
            self.include(st, i);
            let r = self.completes_within(st, limit, clock);
            self.uninclude(st, i);
            if r? {
                found = true;
                break;
            }
            st.mark[i] = Mark::Out;
            excluded.push(i);
        }
        for i in excluded {
            st.mark[i] = Mark::Free;
        }
        Ok(found)
    }
}
