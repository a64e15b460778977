//! JSON documents for workflows and solutions.
//!
//! A graph document looks like
//!
//! ```json
//! {
//!   "vertices": [{"id": 1, "kind": "user"}, {"id": 0, "kind": "algorithm"},
//!                {"id": 3, "kind": "purpose", "weight": 1.0}],
//!   "edges": [{"src": 1, "dst": 0, "base_valuation": 2.0}, {"src": 0, "dst": 3}],
//!   "constraints": [[1, 3]]
//! }
//! ```
//!
//! Purpose weights default to 1 and user-edge base valuations default to 1.
//! Unknown fields are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{AlgorithmKind, Solution};
use crate::error::GraphError;
use crate::graph::{ConstraintSet, Edge, VertexId, VertexKind, Workflow};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} has a weight but is not a purpose")]
    WeightOnNonPurpose(VertexId),
    #[error("edge {0} has a base valuation but does not leave a user vertex")]
    ValuationOnNonUser(Edge),
    #[error("value {0} is not a finite non-negative number")]
    BadNumber(f64),
    #[error("invalid workflow: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: u32,
    pub kind: VertexKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub src: u32,
    pub dst: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_valuation: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub constraints: Vec<[u32; 2]>,
}

fn number<S: Scalar>(x: f64) -> Result<S, SchemaError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SchemaError::BadNumber(x));
    }
    S::from_f64(x).ok_or(SchemaError::BadNumber(x))
}

fn float<S: Scalar>(x: S) -> f64 {
    x.to_f64().map_or(f64::NAN, |v| v + 0.0)
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_workflow<S: Scalar>(graph: &Workflow<S>, constraints: &ConstraintSet) -> Self {
        let vertices = graph
            .vertices()
            .map(|(v, kind)| VertexRecord {
                id: v.0,
                kind,
                weight: (kind == VertexKind::Purpose).then(|| float(graph.purpose_weight(v))),
            })
            .collect();
        let edges = graph
            .edges()
            .map(|e| EdgeRecord {
                src: e.src.0,
                dst: e.dst.0,
                base_valuation: graph.base_valuation(e).map(float),
            })
            .collect();
        let constraints = constraints.pairs().iter().map(|&(s, t)| [s.0, t.0]).collect();
        GraphDocument { vertices, edges, constraints }
    }

    /// Builds the workflow and its constraints, then checks both.
    pub fn to_workflow<S: Scalar>(&self) -> Result<(Workflow<S>, ConstraintSet), SchemaError> {
        let mut graph = Workflow::new();
        for rec in &self.vertices {
            let id = VertexId(rec.id);
            graph.add_vertex(id, rec.kind)?;
            match (rec.kind, rec.weight) {
                (VertexKind::Purpose, w) => graph.set_purpose_weight(id, number(w.unwrap_or(1.0))?),
                (_, Some(_)) => return Err(SchemaError::WeightOnNonPurpose(id)),
                (_, None) => {}
            }
        }
        for rec in &self.edges {
            let (src, dst) = (VertexId(rec.src), VertexId(rec.dst));
            match (graph.kind(src), rec.base_valuation) {
                (None, _) => return Err(GraphError::UnknownVertex(src).into()),
                (Some(VertexKind::UserData), Some(b)) => {
                    graph.add_edge_valued(src, dst, number(b)?)?;
                }
                (Some(_), Some(_)) => return Err(SchemaError::ValuationOnNonUser(Edge { src, dst })),
                (Some(_), None) => {
                    graph.add_edge(src, dst)?;
                }
            }
        }
        if let Some(v) = graph.validate().first() {
            return Err(SchemaError::Invalid(v.to_string()));
        }
        let constraints = ConstraintSet::from_pairs(self.constraints.iter().map(|&[s, t]| (VertexId(s), VertexId(t))))?;
        constraints.check_against(&graph)?;
        Ok((graph, constraints))
    }
}

/// What a solver removed, and from which input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub algorithm: AlgorithmKind,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Edges the solver cut, in removal order.
    pub removed: Vec<[u32; 2]>,
    /// Edges that lost all valuation as a consequence.
    #[serde(default)]
    pub cascaded: Vec<[u32; 2]>,
    pub utility: f64,
    pub original_utility: f64,
    pub runtime_ms: f64,
    /// Hex SHA-256 of the graph file the solution was computed on.
    pub input_digest: String,
}

impl SolutionDocument {
    pub fn new<S: Scalar>(solution: &Solution<S>, original_utility: S, input_digest: String) -> Self {
        let pairs = |edges: &[Edge]| edges.iter().map(|e| [e.src.0, e.dst.0]).collect();
        SolutionDocument {
            algorithm: solution.algorithm,
            seed: solution.seed,
            removed: pairs(&solution.removed),
            cascaded: pairs(&solution.cascaded),
            utility: float(solution.utility),
            original_utility: float(original_utility),
            runtime_ms: solution.runtime_ms(),
            input_digest,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn removed_edges(&self) -> Vec<Edge> {
        self.removed.iter().map(|&[s, t]| Edge::new(s, t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn round_trip_keeps_graph_and_constraints() {
        let g = fan(2.0, 1.0);
        let n = ConstraintSet::from_pairs([(S1, T1), (S2, T2)]).unwrap();
        let doc = GraphDocument::from_workflow(&g, &n);
        let text = doc.to_json();
        let back = GraphDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        let (g2, n2) = back.to_workflow::<f64>().unwrap();
        assert_eq!(g2, g);
        assert_eq!(n2, n);
    }

    #[test]
    fn defaults_fill_weights_and_valuations() {
        let text = r#"{"vertices":[{"id":0,"kind":"user"},{"id":1,"kind":"purpose"}],
                       "edges":[{"src":0,"dst":1}]}"#;
        let (g, n) = GraphDocument::from_json(text).unwrap().to_workflow::<f64>().unwrap();
        assert!(n.is_empty());
        assert_eq!(g.purpose_weight(VertexId(1)), 1.0);
        assert_eq!(g.utility().unwrap(), 1.0);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"vertices":[{"id":0,"kind":"user","colour":"red"}],"edges":[]}"#;
        assert!(matches!(GraphDocument::from_json(text), Err(SchemaError::Json(_))));
        let text = r#"{"vertices":[],"edges":[],"extra":1}"#;
        assert!(GraphDocument::from_json(text).is_err());
    }

    #[test]
    fn misplaced_numbers_are_rejected() {
        let doc = GraphDocument {
            vertices: vec![
                VertexRecord { id: 0, kind: VertexKind::UserData, weight: Some(2.0) },
            ],
            edges: vec![],
            constraints: vec![],
        };
        assert!(matches!(doc.to_workflow::<f64>(), Err(SchemaError::WeightOnNonPurpose(_))));

        let doc = GraphDocument {
            vertices: vec![
                VertexRecord { id: 0, kind: VertexKind::Algorithm, weight: None },
                VertexRecord { id: 1, kind: VertexKind::Purpose, weight: None },
            ],
            edges: vec![EdgeRecord { src: 0, dst: 1, base_valuation: Some(1.0) }],
            constraints: vec![],
        };
        assert!(matches!(doc.to_workflow::<f64>(), Err(SchemaError::ValuationOnNonUser(_))));
    }

    #[test]
    fn cycles_and_bad_constraints_are_rejected() {
        let text = r#"{"vertices":[{"id":0,"kind":"algorithm"},{"id":1,"kind":"algorithm"}],
                       "edges":[{"src":0,"dst":1},{"src":1,"dst":0}]}"#;
        let err = GraphDocument::from_json(text).unwrap().to_workflow::<f64>().unwrap_err();
        assert!(err.to_string().contains("cycle"), "{err}");

        let g = fan(2.0, 1.0);
        let mut doc = GraphDocument::from_workflow(&g, &ConstraintSet::new());
        doc.constraints.push([3, 1]);
        assert!(doc.to_workflow::<f64>().is_err());
    }

    #[test]
    fn exact_scalars_load() {
        let g = fan(2.0, 1.0);
        let doc = GraphDocument::from_workflow(&g, &ConstraintSet::new());
        let (exact, _) = doc.to_workflow::<num_rational::Rational64>().unwrap();
        assert_eq!(exact.utility().unwrap(), num_rational::Rational64::from_integer(6));
    }
}
