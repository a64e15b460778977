//! Additive valuations, purpose utility, and edge removal with dependency
//! updates.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use super::{Edge, VertexId, VertexKind, Workflow};
use crate::error::GraphError;
use crate::scalar::Scalar;

/// A value per edge: valuations `π(e)` or capacities `w(e)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EdgeMap<S> {
    values: BTreeMap<Edge, S>,
}

impl<S: Scalar> EdgeMap<S> {
    pub fn new() -> Self {
        EdgeMap { values: BTreeMap::new() }
    }

    pub fn get(&self, e: Edge) -> Option<S> {
        self.values.get(&e).copied()
    }

    /// Value of `e`, zero when absent.
    pub fn value(&self, e: Edge) -> S {
        self.get(e).unwrap_or_else(S::zero)
    }

    pub fn insert(&mut self, e: Edge, v: S) -> Option<S> {
        self.values.insert(e, v)
    }

    pub fn remove(&mut self, e: Edge) -> Option<S> {
        self.values.remove(&e)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, S)> + '_ {
        self.values.iter().map(|(&e, &v)| (e, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.values.keys().copied()
    }
}

impl<S: Scalar> FromIterator<(Edge, S)> for EdgeMap<S> {
    fn from_iter<I: IntoIterator<Item = (Edge, S)>>(iter: I) -> Self {
        EdgeMap { values: iter.into_iter().collect() }
    }
}

impl<S: Scalar> Workflow<S> {
    /// Sum of the valuations entering `v`, in ascending source order.
    pub(crate) fn inflow(&self, pi: &EdgeMap<S>, v: VertexId) -> S {
        self.in_edges(v).map(|e| pi.value(e)).sum()
    }

    /// Valuation every out-edge of `v` carries, given the current `pi`.
    fn outflow(&self, pi: &EdgeMap<S>, e: Edge) -> S {
        match self.kind(e.src) {
            Some(VertexKind::UserData) => self.base_valuation(e).unwrap_or_else(S::zero),
            _ => self.inflow(pi, e.src),
        }
    }

    /// Derives `π` for every edge: user data out-edges carry their base
    /// valuation, every other edge the sum of its tail's in-edge valuations.
    pub fn propagate_valuations(&self) -> Result<EdgeMap<S>, GraphError> {
        let order = self.topological_order()?;
        let mut pi = EdgeMap::new();
        for v in order {
            let out: Vec<Edge> = self.out_edges(v).collect();
            if out.is_empty() {
                continue;
            }
            for e in out {
                let val = self.outflow(&pi, e);
                pi.insert(e, val);
            }
        }
        Ok(pi)
    }

    /// `u_p`: sum of valuations entering purpose `p`.
    pub fn purpose_utility(&self, pi: &EdgeMap<S>, p: VertexId) -> Result<S, GraphError> {
        match self.kind(p) {
            None => Err(GraphError::UnknownVertex(p)),
            Some(VertexKind::Purpose) => Ok(self.inflow(pi, p)),
            Some(_) => Err(GraphError::NotPurpose(p)),
        }
    }

    /// `U(G) = Σ_p w_p · u_p`, summed in ascending purpose order.
    pub fn global_utility(&self, pi: &EdgeMap<S>) -> S {
        self.purposes()
            .map(|p| self.purpose_weight(p) * self.inflow(pi, p))
            .sum()
    }

    /// Convenience: propagate then aggregate.
    pub fn utility(&self) -> Result<S, GraphError> {
        Ok(self.global_utility(&self.propagate_valuations()?))
    }

    /// Removes `e`, recomputes valuations downstream of its head and drops
    /// every edge whose valuation becomes zero, cascading.
    pub fn remove_edge_with_update(&self, pi: &EdgeMap<S>, e: Edge) -> Result<(Workflow<S>, EdgeMap<S>), GraphError> {
        let mut work = Working::with_valuations(self.clone(), pi.clone())?;
        work.remove(e)?;
        let (g, pi) = work.into_parts();
        Ok((g, pi))
    }
}

/// Mutable working copy used by the solvers: graph, valuations and a fixed
/// topological rank. Removing edges never invalidates the rank.
#[derive(Clone, Debug)]
pub(crate) struct Working<S> {
    graph: Workflow<S>,
    pi: EdgeMap<S>,
    rank: HashMap<VertexId, usize>,
}

impl<S: Scalar> Working<S> {
    pub fn new(graph: Workflow<S>) -> Result<Self, GraphError> {
        let pi = graph.propagate_valuations()?;
        Self::with_valuations(graph, pi)
    }

    pub fn with_valuations(graph: Workflow<S>, pi: EdgeMap<S>) -> Result<Self, GraphError> {
        let rank = graph
            .topological_order()?
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        Ok(Working { graph, pi, rank })
    }

    pub fn graph(&self) -> &Workflow<S> {
        &self.graph
    }

    pub fn valuations(&self) -> &EdgeMap<S> {
        &self.pi
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.graph.has_edge(e)
    }

    pub fn utility(&self) -> S {
        self.graph.global_utility(&self.pi)
    }

    pub fn into_parts(self) -> (Workflow<S>, EdgeMap<S>) {
        (self.graph, self.pi)
    }

    /// Removes `e` and returns the edges dropped by the zero cascade.
    pub fn remove(&mut self, e: Edge) -> Result<Vec<Edge>, GraphError> {
        if !self.graph.detach_edge(e) {
            return Err(GraphError::UnknownEdge(e));
        }
        self.pi.remove(e);
        let mut cascaded = Vec::new();
        let mut queue: BinaryHeap<Reverse<(usize, VertexId)>> = BinaryHeap::new();
        self.schedule(&mut queue, e.dst);
        let mut last = None;
        while let Some(Reverse((r, v))) = queue.pop() {
            if last == Some((r, v)) {
                continue;
            }
            last = Some((r, v));
            let out: Vec<Edge> = self.graph.out_edges(v).collect();
            if out.is_empty() {
                continue;
            }
            let val = self.graph.inflow(&self.pi, v);
            if val.is_zero() {
                for f in out {
                    self.graph.detach_edge(f);
                    self.pi.remove(f);
                    cascaded.push(f);
                    self.schedule(&mut queue, f.dst);
                }
            } else {
                for f in out {
                    if self.pi.insert(f, val) != Some(val) {
                        self.schedule(&mut queue, f.dst);
                    }
                }
            }
        }
        Ok(cascaded)
    }

    fn schedule(&self, queue: &mut BinaryHeap<Reverse<(usize, VertexId)>>, v: VertexId) {
        match self.graph.kind(v) {
            Some(VertexKind::UserData) | Some(VertexKind::Purpose) => {}
            _ => queue.push(Reverse((self.rank[&v], v))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn fan_valuations_add_up() {
        let g = fan(2.0, 1.0);
        let pi = g.propagate_valuations().unwrap();
        assert_eq!(pi.value(Edge { src: V1, dst: T1 }), 3.0);
        assert_eq!(pi.value(Edge { src: V1, dst: T2 }), 3.0);
        assert_eq!(pi.value(Edge { src: S1, dst: V1 }), 2.0);
        assert_eq!(g.purpose_utility(&pi, T1).unwrap(), 3.0);
        assert_eq!(g.global_utility(&pi), 6.0);
    }

    #[test]
    fn single_edge_and_three_layers() {
        let mut g: Workflow<f64> = Workflow::new();
        let u = g.add_user(0).unwrap();
        let p = g.add_purpose(1, 1.0).unwrap();
        g.add_edge(u, p).unwrap();
        assert_eq!(g.propagate_valuations().unwrap().value(Edge { src: u, dst: p }), 1.0);

        let mut g: Workflow<f64> = Workflow::new();
        let u1 = g.add_user(0).unwrap();
        let u2 = g.add_user(1).unwrap();
        let a1 = g.add_algorithm(2).unwrap();
        let a2 = g.add_algorithm(3).unwrap();
        let p = g.add_purpose(4, 1.0).unwrap();
        for (s, d) in [(u1, a1), (u2, a1), (a1, a2), (a2, p)] {
            g.add_edge(s, d).unwrap();
        }
        assert_eq!(g.propagate_valuations().unwrap().value(Edge { src: a2, dst: p }), 2.0);
    }

    #[test]
    fn purpose_utility_edge_cases() {
        let mut g: Workflow<f64> = Workflow::new();
        let p = g.add_purpose(0, 1.0).unwrap();
        let pi = g.propagate_valuations().unwrap();
        assert_eq!(g.purpose_utility(&pi, p).unwrap(), 0.0);
        assert_eq!(g.global_utility(&pi), 0.0);
        let a = g.add_algorithm(1).unwrap();
        assert_eq!(g.purpose_utility(&pi, a), Err(GraphError::NotPurpose(a)));
        assert_eq!(g.purpose_utility(&pi, VertexId(9)), Err(GraphError::UnknownVertex(VertexId(9))));

        // two in-edges of valuation 3 each
        let mut g: Workflow<f64> = Workflow::new();
        let u = g.add_user(0).unwrap();
        let a = g.add_algorithm(1).unwrap();
        let b = g.add_algorithm(2).unwrap();
        let p = g.add_purpose(3, 1.0).unwrap();
        g.add_edge_valued(u, a, 3.0).unwrap();
        g.add_edge_valued(u, b, 3.0).unwrap();
        g.add_edge(a, p).unwrap();
        g.add_edge(b, p).unwrap();
        let pi = g.propagate_valuations().unwrap();
        assert_eq!(g.purpose_utility(&pi, p).unwrap(), 6.0);
    }

    #[test]
    fn no_purposes_means_no_utility() {
        let mut g: Workflow<f64> = Workflow::new();
        let u = g.add_user(0).unwrap();
        let a = g.add_algorithm(1).unwrap();
        g.add_edge(u, a).unwrap();
        assert_eq!(g.utility().unwrap(), 0.0);
    }

    #[test]
    fn single_branch_example_has_utility_2a() {
        // one user, one algorithm, two purposes
        let mut g: Workflow<f64> = Workflow::new();
        let v1 = g.add_user(1).unwrap();
        let v2 = g.add_algorithm(2).unwrap();
        let v3 = g.add_purpose(3, 1.0).unwrap();
        let v4 = g.add_purpose(4, 1.0).unwrap();
        g.add_edge_valued(v1, v2, 2.0).unwrap();
        g.add_edge(v2, v3).unwrap();
        g.add_edge(v2, v4).unwrap();
        assert_eq!(g.utility().unwrap(), 4.0);
    }

    #[test]
    fn removing_a_user_edge_updates_downstream() {
        let g = fan(2.0, 1.0);
        let pi = g.propagate_valuations().unwrap();
        let (g2, pi2) = g.remove_edge_with_update(&pi, Edge { src: S1, dst: V1 }).unwrap();
        assert_eq!(pi2.value(Edge { src: V1, dst: T1 }), 1.0);
        assert_eq!(pi2.value(Edge { src: V1, dst: T2 }), 1.0);
        assert_eq!(g2.edge_count(), 3);
        assert_eq!(pi2, g2.propagate_valuations().unwrap());
    }

    #[test]
    fn chain_removal_cascades_to_zero() {
        let g = chain();
        let pi = g.propagate_valuations().unwrap();
        let (g2, pi2) = g.remove_edge_with_update(&pi, Edge::new(0, 1)).unwrap();
        assert_eq!(g2.edge_count(), 0);
        assert!(pi2.is_empty());
        assert_eq!(g2.global_utility(&pi2), 0.0);
    }

    #[test]
    fn two_step_walkthrough_leaves_b() {
        let g = fan(Ratio::from_integer(2i64), Ratio::from_integer(1));
        let pi = g.propagate_valuations().unwrap();
        let (g, pi) = g.remove_edge_with_update(&pi, Edge { src: V1, dst: T1 }).unwrap();
        let (g, pi) = g.remove_edge_with_update(&pi, Edge { src: S1, dst: V1 }).unwrap();
        assert_eq!(g.global_utility(&pi), Ratio::from_integer(1));
    }

    #[test]
    fn removing_absent_edge_fails() {
        let g = fan(2.0, 1.0);
        let pi = g.propagate_valuations().unwrap();
        let missing = Edge { src: S1, dst: T1 };
        assert_eq!(g.remove_edge_with_update(&pi, missing), Err(GraphError::UnknownEdge(missing)));
    }
}
