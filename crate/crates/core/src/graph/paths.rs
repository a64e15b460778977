//! Reachability, feasibility and path enumeration.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{ConstraintSet, Edge, VertexId, VertexKind, Workflow};
use crate::error::GraphError;
use crate::scalar::Scalar;

/// The vertices that reach a purpose, plus the purpose, and the edges among
/// them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachabilitySubgraph {
    pub purpose: VertexId,
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<Edge>,
}

impl<S: Scalar> Workflow<S> {
    /// Vertices with a directed path to `v`, including `v`.
    pub fn ancestors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for y in self.predecessors(x) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Vertices reachable from `v`, including `v`.
    pub fn descendants(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for y in self.successors(x) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn reachability_subgraph(&self, p: VertexId) -> Result<ReachabilitySubgraph, GraphError> {
        match self.kind(p) {
            None => return Err(GraphError::UnknownVertex(p)),
            Some(VertexKind::Purpose) => {}
            Some(_) => return Err(GraphError::NotPurpose(p)),
        }
        let vertices = self.ancestors(p);
        let edges = vertices
            .iter()
            .flat_map(|&v| self.out_edges(v))
            .filter(|e| vertices.contains(&e.dst))
            .collect();
        Ok(ReachabilitySubgraph { purpose: p, vertices, edges })
    }

    /// `r(v)`: purpose vertices reachable from `v`.
    pub fn reachable_purposes(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.descendants(v)
            .into_iter()
            .filter(|&x| self.kind(x) == Some(VertexKind::Purpose))
            .collect()
    }

    pub fn reaches(&self, s: VertexId, t: VertexId) -> bool {
        if s == t {
            return true;
        }
        let mut seen = HashSet::from([s]);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for y in self.successors(x) {
                if y == t {
                    return true;
                }
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    }

    /// True iff no constraint pair is connected by a directed path.
    pub fn is_feasible(&self, constraints: &ConstraintSet) -> Result<bool, GraphError> {
        for &(s, t) in constraints.pairs() {
            for v in [s, t] {
                if !self.contains_vertex(v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
        }
        Ok(constraints.pairs().iter().all(|&(s, t)| !self.reaches(s, t)))
    }

    /// Every simple `s → t` path as its edge list, in lexicographic order of
    /// the vertex sequences.
    pub fn enumerate_paths(&self, s: VertexId, t: VertexId) -> Vec<Vec<Edge>> {
        self.paths_between(s, t, None).expect("no limit")
    }

    /// Like [`Workflow::enumerate_paths`] but fails once more than `limit`
    /// paths have been produced.
    pub fn paths_between(&self, s: VertexId, t: VertexId, limit: Option<usize>) -> Result<Vec<Vec<Edge>>, GraphError> {
        let mut out = Vec::new();
        if s == t || !self.contains_vertex(s) || !self.contains_vertex(t) {
            return Ok(out);
        }
        let useful = self.ancestors(t);
        if !useful.contains(&s) {
            return Ok(out);
        }
        let mut on_path = HashSet::from([s]);
        let mut path: Vec<Edge> = Vec::new();
        let mut stack: Vec<std::vec::IntoIter<VertexId>> = vec![self.next_hops(s, &useful)];
        while let Some(frontier) = stack.last_mut() {
            match frontier.next() {
                Some(y) => {
                    let x = path.last().map_or(s, |e| e.dst);
                    if on_path.contains(&y) {
                        continue;
                    }
                    path.push(Edge { src: x, dst: y });
                    if y == t {
                        if limit.is_some_and(|l| out.len() >= l) {
                            return Err(GraphError::PathLimit { limit: limit.unwrap() });
                        }
                        out.push(path.clone());
                        path.pop();
                    } else {
                        on_path.insert(y);
                        stack.push(self.next_hops(y, &useful));
                    }
                }
                None => {
                    stack.pop();
                    if let Some(e) = path.pop() {
                        on_path.remove(&e.dst);
                    }
                }
            }
        }
        Ok(out)
    }

    fn next_hops(&self, v: VertexId, useful: &BTreeSet<VertexId>) -> std::vec::IntoIter<VertexId> {
        self.successors(v)
            .filter(|w| useful.contains(w))
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// Lexicographically first `s → t` path, if any. Linear time on a DAG.
    pub fn first_path(&self, s: VertexId, t: VertexId) -> Option<Vec<Edge>> {
        if s == t {
            return None;
        }
        let useful = self.ancestors(t);
        if !useful.contains(&s) {
            return None;
        }
        let mut path = Vec::new();
        let mut x = s;
        while x != t {
            let y = self.successors(x).find(|w| useful.contains(w))?;
            path.push(Edge { src: x, dst: y });
            x = y;
            if path.len() > self.vertex_count() {
                return None;
            }
        }
        Some(path)
    }

    /// Number of `s → t` paths, saturating. Requires a DAG.
    pub fn count_paths(&self, s: VertexId, t: VertexId) -> Result<u64, GraphError> {
        if s == t {
            return Ok(0);
        }
        let order = self.topological_order()?;
        let mut ways: BTreeMap<VertexId, u64> = BTreeMap::new();
        ways.insert(s, 1);
        for v in order {
            let n = match ways.get(&v) {
                Some(&n) if n > 0 => n,
                _ => continue,
            };
            if v == t {
                continue;
            }
            for w in self.successors(v) {
                let slot = ways.entry(w).or_insert(0);
                *slot = slot.saturating_add(n);
            }
        }
        Ok(ways.get(&t).copied().unwrap_or(0))
    }
}
