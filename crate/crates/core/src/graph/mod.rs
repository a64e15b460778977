//! Workflow graph model.
//!
//! A workflow is a DAG with three kinds of vertices: user data sources,
//! algorithms, and purposes (sinks). Edges out of user data vertices carry
//! a base valuation; everything downstream is derived additively.

mod paths;
mod valuation;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::scalar::Scalar;

pub use paths::ReachabilitySubgraph;
pub use valuation::EdgeMap;
pub(crate) use valuation::Working;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    #[serde(rename = "user")]
    UserData,
    Algorithm,
    Purpose,
}

/// Directed edge. Ordered by `(src, dst)`, which is the order used for every
/// tie-break in the crate.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
}

impl Edge {
    pub fn new(src: u32, dst: u32) -> Self {
        Edge {
            src: VertexId(src),
            dst: VertexId(dst),
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.src, self.dst)
    }
}

/// Set of `(user, purpose)` pairs that must end up disconnected.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pairs: Vec<(VertexId, VertexId)>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a constraint set, rejecting duplicate pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut set = Self::new();
        for (s, t) in pairs {
            set.push(s, t)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, s: VertexId, t: VertexId) -> Result<(), GraphError> {
        if self.pairs.contains(&(s, t)) {
            return Err(GraphError::DuplicateConstraint(s, t));
        }
        self.pairs.push((s, t));
        Ok(())
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks that every source is a user data vertex and every target a
    /// purpose vertex of `graph`.
    pub fn check_against<S: Scalar>(&self, graph: &Workflow<S>) -> Result<(), GraphError> {
        for &(s, t) in &self.pairs {
            match graph.kind(s) {
                None => return Err(GraphError::UnknownVertex(s)),
                Some(VertexKind::UserData) => {}
                Some(_) => return Err(GraphError::NotUserData(s)),
            }
            match graph.kind(t) {
                None => return Err(GraphError::UnknownVertex(t)),
                Some(VertexKind::Purpose) => {}
                Some(_) => return Err(GraphError::NotPurpose(t)),
            }
        }
        Ok(())
    }
}

/// Which structural rule a [`Violation`] breaks.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    CycleDetected,
    UnknownEndpoint,
    UserHasInEdge,
    PurposeHasOutEdge,
    MissingBaseValuation,
    NonPositiveBaseValuation,
    UnexpectedBaseValuation,
    WeightOnNonPurpose,
    NegativePurposeWeight,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::CycleDetected => "cycle detected",
            Rule::UnknownEndpoint => "edge endpoint does not exist",
            Rule::UserHasInEdge => "user data vertex has in-edge",
            Rule::PurposeHasOutEdge => "purpose has out-edge",
            Rule::MissingBaseValuation => "user data out-edge has no base valuation",
            Rule::NonPositiveBaseValuation => "base valuation is not positive",
            Rule::UnexpectedBaseValuation => "base valuation on edge not leaving a user data vertex",
            Rule::WeightOnNonPurpose => "weight on non-purpose vertex",
            Rule::NegativePurposeWeight => "purpose weight is negative",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub vertex: Option<VertexId>,
    pub edge: Option<Edge>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule.describe())?;
        if let Some(e) = self.edge {
            write!(f, " at edge {e}")?;
        } else if let Some(v) = self.vertex {
            write!(f, " at vertex {v}")?;
        }
        Ok(())
    }
}

/// Typed workflow DAG with purpose weights and base valuations.
///
/// The builder methods accept structurally invalid input on purpose so that
/// [`Workflow::validate`] can report it; solvers assume a valid graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Workflow<S> {
    kinds: BTreeMap<VertexId, VertexKind>,
    purpose_weights: BTreeMap<VertexId, S>,
    base_valuations: BTreeMap<Edge, S>,
    out: BTreeMap<VertexId, BTreeSet<VertexId>>,
    inc: BTreeMap<VertexId, BTreeSet<VertexId>>,
    n_edges: usize,
}

impl<S: Scalar> Default for Workflow<S> {
    fn default() -> Self {
        Workflow {
            kinds: BTreeMap::new(),
            purpose_weights: BTreeMap::new(),
            base_valuations: BTreeMap::new(),
            out: BTreeMap::new(),
            inc: BTreeMap::new(),
            n_edges: 0,
        }
    }
}

impl<S: Scalar> Workflow<S> {
    pub fn new() -> Self {
        Self::default()
    }

    fn touch(&mut self, v: VertexId) {
        self.out.entry(v).or_default();
        self.inc.entry(v).or_default();
    }

    /// Adds a vertex. Purpose vertices get weight 1 unless set afterwards.
    pub fn add_vertex(&mut self, id: VertexId, kind: VertexKind) -> Result<(), GraphError> {
        if self.kinds.contains_key(&id) {
            return Err(GraphError::DuplicateVertex(id));
        }
        self.kinds.insert(id, kind);
        self.touch(id);
        if kind == VertexKind::Purpose {
            self.purpose_weights.insert(id, S::one());
        }
        Ok(())
    }

    pub fn add_user(&mut self, id: u32) -> Result<VertexId, GraphError> {
        self.add_vertex(VertexId(id), VertexKind::UserData)?;
        Ok(VertexId(id))
    }

    pub fn add_algorithm(&mut self, id: u32) -> Result<VertexId, GraphError> {
        self.add_vertex(VertexId(id), VertexKind::Algorithm)?;
        Ok(VertexId(id))
    }

    pub fn add_purpose(&mut self, id: u32, weight: S) -> Result<VertexId, GraphError> {
        self.add_vertex(VertexId(id), VertexKind::Purpose)?;
        self.purpose_weights.insert(VertexId(id), weight);
        Ok(VertexId(id))
    }

    /// Sets `w_p`. Stored even for non-purpose vertices so validation can
    /// flag it.
    pub fn set_purpose_weight(&mut self, id: VertexId, weight: S) {
        self.purpose_weights.insert(id, weight);
    }

    /// Adds an edge. Edges leaving a user data vertex get base valuation 1.
    pub fn add_edge(&mut self, src: VertexId, dst: VertexId) -> Result<Edge, GraphError> {
        let base = (self.kind(src) == Some(VertexKind::UserData)).then(S::one);
        self.insert_edge(src, dst, base)
    }

    /// Adds an edge with an explicit base valuation.
    pub fn add_edge_valued(&mut self, src: VertexId, dst: VertexId, base: S) -> Result<Edge, GraphError> {
        self.insert_edge(src, dst, Some(base))
    }

    fn insert_edge(&mut self, src: VertexId, dst: VertexId, base: Option<S>) -> Result<Edge, GraphError> {
        let e = Edge { src, dst };
        if self.has_edge(e) {
            return Err(GraphError::DuplicateEdge(e));
        }
        self.touch(src);
        self.touch(dst);
        self.out.get_mut(&src).expect("touched").insert(dst);
        self.inc.get_mut(&dst).expect("touched").insert(src);
        self.n_edges += 1;
        if let Some(b) = base {
            self.base_valuations.insert(e, b);
        }
        Ok(e)
    }

    /// Removes an edge without touching any valuation. Returns whether it
    /// was present.
    pub(crate) fn detach_edge(&mut self, e: Edge) -> bool {
        let removed = self.out.get_mut(&e.src).is_some_and(|s| s.remove(&e.dst));
        if removed {
            self.inc.get_mut(&e.dst).expect("mirror").remove(&e.src);
            self.n_edges -= 1;
        }
        removed
    }

    pub fn kind(&self, v: VertexId) -> Option<VertexKind> {
        self.kinds.get(&v).copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.kinds.contains_key(&v)
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.out.get(&e.src).is_some_and(|s| s.contains(&e.dst))
    }

    /// All vertices, including dangling edge endpoints, in ascending order.
    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.out.keys().copied()
    }

    /// Declared vertices with their kinds, in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, VertexKind)> + '_ {
        self.kinds.iter().map(|(&v, &k)| (v, k))
    }

    pub fn vertices_of_kind(&self, kind: VertexKind) -> impl Iterator<Item = VertexId> + '_ {
        self.kinds.iter().filter(move |(_, &k)| k == kind).map(|(&v, _)| v)
    }

    pub fn purposes(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices_of_kind(VertexKind::Purpose)
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.n_edges
    }

    /// Edges in `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out
            .iter()
            .flat_map(|(&src, dsts)| dsts.iter().map(move |&dst| Edge { src, dst }))
    }

    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn predecessors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.inc.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.successors(v).map(move |dst| Edge { src: v, dst })
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.predecessors(v).map(move |src| Edge { src, dst: v })
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out.get(&v).map_or(0, |s| s.len())
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.inc.get(&v).map_or(0, |s| s.len())
    }

    /// `w_p`, zero for vertices without a weight.
    pub fn purpose_weight(&self, p: VertexId) -> S {
        self.purpose_weights.get(&p).copied().unwrap_or_else(S::zero)
    }

    pub fn base_valuation(&self, e: Edge) -> Option<S> {
        self.base_valuations.get(&e).copied()
    }

    /// Copy of the graph with `removed` edges gone; base valuations of
    /// the removed edges are kept so the original can be reconstructed.
    pub fn without_edges<'a, I>(&self, removed: I) -> Self
    where
        I: IntoIterator<Item = &'a Edge>,
    {
        let mut g = self.clone();
        for &e in removed {
            g.detach_edge(e);
        }
        g
    }

    /// Structural check. Returns every violated rule; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |rule, vertex, edge| out.push(Violation { rule, vertex, edge });

        for e in self.edges() {
            if !self.contains_vertex(e.src) {
                push(Rule::UnknownEndpoint, Some(e.src), Some(e));
            }
            if !self.contains_vertex(e.dst) {
                push(Rule::UnknownEndpoint, Some(e.dst), Some(e));
            }
            if self.kind(e.dst) == Some(VertexKind::UserData) {
                push(Rule::UserHasInEdge, Some(e.dst), Some(e));
            }
            match self.kind(e.src) {
                Some(VertexKind::Purpose) => push(Rule::PurposeHasOutEdge, Some(e.src), Some(e)),
                Some(VertexKind::UserData) => match self.base_valuation(e) {
                    None => push(Rule::MissingBaseValuation, Some(e.src), Some(e)),
                    Some(b) if b.partial_cmp(&S::zero()) != Some(std::cmp::Ordering::Greater) => push(Rule::NonPositiveBaseValuation, Some(e.src), Some(e)),
                    Some(_) => {}
                },
                _ => {
                    if self.base_valuations.contains_key(&e) {
                        push(Rule::UnexpectedBaseValuation, Some(e.src), Some(e));
                    }
                }
            }
        }
        for e in self.base_valuations.keys() {
            if !self.has_edge(*e) {
                push(Rule::UnexpectedBaseValuation, Some(e.src), Some(*e));
            }
        }
        for (&v, &w) in &self.purpose_weights {
            if self.kind(v) != Some(VertexKind::Purpose) {
                push(Rule::WeightOnNonPurpose, Some(v), None);
            } else if w < S::zero() {
                push(Rule::NegativePurposeWeight, Some(v), None);
            }
        }
        if let Err(GraphError::CycleThrough(v)) = self.topological_order() {
            push(Rule::CycleDetected, Some(v), None);
        }
        out
    }

    /// Kahn's algorithm; among ready vertices the smallest id goes first.
    pub fn topological_order(&self) -> Result<Vec<VertexId>, GraphError> {
        let mut indeg: BTreeMap<VertexId, usize> =
            self.inc.iter().map(|(&v, preds)| (v, preds.len())).collect();
        let mut ready: BinaryHeap<Reverse<VertexId>> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| Reverse(v))
            .collect();
        let mut order = Vec::with_capacity(indeg.len());
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for w in self.successors(v) {
                let d = indeg.get_mut(&w).expect("touched");
                *d -= 1;
                if *d == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        if order.len() < indeg.len() {
            let stuck = indeg
                .iter()
                .find(|(_, &d)| d > 0)
                .map(|(&v, _)| v)
                .expect("some vertex left");
            return Err(GraphError::CycleThrough(stuck));
        }
        Ok(order)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two users feeding one algorithm that serves two purposes. Ids are
    /// v1=0, s1=1, s2=2, t1=3, t2=4.
    pub fn fan<S: Scalar>(a: S, b: S) -> Workflow<S> {
        let mut g = Workflow::new();
        let v1 = g.add_algorithm(0).unwrap();
        let s1 = g.add_user(1).unwrap();
        let s2 = g.add_user(2).unwrap();
        let t1 = g.add_purpose(3, S::one()).unwrap();
        let t2 = g.add_purpose(4, S::one()).unwrap();
        g.add_edge_valued(s1, v1, a).unwrap();
        g.add_edge_valued(s2, v1, b).unwrap();
        g.add_edge(v1, t1).unwrap();
        g.add_edge(v1, t2).unwrap();
        g
    }

    pub const V1: VertexId = VertexId(0);
    pub const S1: VertexId = VertexId(1);
    pub const S2: VertexId = VertexId(2);
    pub const T1: VertexId = VertexId(3);
    pub const T2: VertexId = VertexId(4);

    pub fn chain() -> Workflow<f64> {
        let mut g = Workflow::new();
        let u = g.add_user(0).unwrap();
        let a = g.add_algorithm(1).unwrap();
        let p = g.add_purpose(2, 1.0).unwrap();
        g.add_edge(u, a).unwrap();
        g.add_edge(a, p).unwrap();
        g
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fan_is_valid() {
        assert!(fan(2.0, 1.0).validate().is_empty());
    }

    #[test]
    fn purpose_out_edge_is_reported() {
        let mut g = fan(2.0, 1.0);
        g.add_edge(T1, V1).unwrap();
        let v = g.validate();
        // the back edge also closes a cycle v1 -> t1 -> v1
        assert!(v.iter().any(|x| x.rule == Rule::PurposeHasOutEdge && x.edge == Some(Edge { src: T1, dst: V1 })));
        let purpose_rules: Vec<_> = v.iter().filter(|x| x.rule == Rule::PurposeHasOutEdge).collect();
        assert_eq!(purpose_rules.len(), 1);
        assert_eq!(purpose_rules[0].to_string(), "purpose has out-edge at edge (3, 0)");
    }

    #[test]
    fn purpose_out_edge_alone() {
        let mut g = fan(2.0, 1.0);
        let v2 = g.add_algorithm(9).unwrap();
        g.add_edge(T1, v2).unwrap();
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::PurposeHasOutEdge);
    }

    #[test]
    fn cycle_is_reported_once() {
        let mut g: Workflow<f64> = Workflow::new();
        let v1 = g.add_algorithm(1).unwrap();
        let v2 = g.add_algorithm(2).unwrap();
        g.add_edge(v1, v2).unwrap();
        g.add_edge(v2, v1).unwrap();
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::CycleDetected);
        assert!(v[0].to_string().starts_with("cycle detected"));
        assert!(matches!(g.topological_order(), Err(GraphError::CycleThrough(_))));
    }

    #[test]
    fn base_valuation_rules() {
        let mut g: Workflow<f64> = Workflow::new();
        let u = g.add_user(0).unwrap();
        let a = g.add_algorithm(1).unwrap();
        let p = g.add_purpose(2, 1.0).unwrap();
        g.add_edge_valued(u, a, 0.0).unwrap();
        g.add_edge_valued(a, p, 3.0).unwrap();
        g.set_purpose_weight(a, 2.0);
        let rules: Vec<Rule> = g.validate().into_iter().map(|v| v.rule).collect();
        assert_eq!(
            rules,
            vec![Rule::NonPositiveBaseValuation, Rule::UnexpectedBaseValuation, Rule::WeightOnNonPurpose]
        );
    }

    #[test]
    fn dangling_endpoint_and_user_in_edge() {
        let mut g: Workflow<f64> = Workflow::new();
        let u = g.add_user(0).unwrap();
        let a = g.add_algorithm(1).unwrap();
        g.add_edge(a, u).unwrap();
        g.add_edge(a, VertexId(7)).unwrap();
        let rules: Vec<Rule> = g.validate().into_iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec![Rule::UserHasInEdge, Rule::UnknownEndpoint]);
    }

    #[test]
    fn duplicate_edges_are_rejected() {
        let mut g = fan(2.0, 1.0);
        assert_eq!(g.add_edge(S1, V1), Err(GraphError::DuplicateEdge(Edge { src: S1, dst: V1 })));
    }

    #[test]
    fn topological_order_breaks_ties_by_id() {
        assert_eq!(fan(2.0, 1.0).topological_order().unwrap(), vec![S1, S2, V1, T1, T2]);
        let mut single: Workflow<f64> = Workflow::new();
        single.add_user(4).unwrap();
        assert_eq!(single.topological_order().unwrap(), vec![VertexId(4)]);
        assert_eq!(
            chain().topological_order().unwrap(),
            vec![VertexId(0), VertexId(1), VertexId(2)]
        );
    }

    #[test]
    fn constraint_set_checks() {
        let g = fan(2.0, 1.0);
        assert!(ConstraintSet::from_pairs([(S1, T1), (S1, T1)]).is_err());
        let ok = ConstraintSet::from_pairs([(S1, T1), (S2, T2)]).unwrap();
        assert!(ok.check_against(&g).is_ok());
        let bad = ConstraintSet::from_pairs([(V1, T1)]).unwrap();
        assert_eq!(bad.check_against(&g), Err(GraphError::NotUserData(V1)));
        let bad = ConstraintSet::from_pairs([(S1, V1)]).unwrap();
        assert_eq!(bad.check_against(&g), Err(GraphError::NotPurpose(V1)));
    }
}
