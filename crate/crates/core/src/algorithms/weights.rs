use std::collections::BTreeMap;

use crate::error::GraphError;
use crate::graph::{EdgeMap, VertexId, VertexKind, Workflow};
use crate::scalar::Scalar;

/// Total weight of the purposes reachable from each vertex.
pub fn reach_weights<S: Scalar>(graph: &Workflow<S>) -> Result<BTreeMap<VertexId, S>, GraphError> {
    let purposes: Vec<VertexId> = graph.purposes().collect();
    let slot: BTreeMap<VertexId, usize> = purposes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let words = purposes.len().div_ceil(64).max(1);

    let order = graph.topological_order()?;
    let mut reach: BTreeMap<VertexId, Vec<u64>> = BTreeMap::new();
    for &v in order.iter().rev() {
        let mut bits = vec![0u64; words];
        if graph.kind(v) == Some(VertexKind::Purpose) {
            let i = slot[&v];
            bits[i / 64] |= 1 << (i % 64);
        }
        for w in graph.successors(v) {
            for (b, x) in bits.iter_mut().zip(&reach[&w]) {
                *b |= x;
            }
        }
        reach.insert(v, bits);
    }

    Ok(reach
        .into_iter()
        .map(|(v, bits)| {
            let total = purposes
                .iter()
                .enumerate()
                .filter(|(i, _)| bits[i / 64] >> (i % 64) & 1 == 1)
                .map(|(_, &p)| graph.purpose_weight(p))
                .sum();
            (v, total)
        })
        .collect())
}

/// Edge weight `π(e)` times the total weight of the purposes reachable from
/// the head of `e`.
pub fn init_weights<S: Scalar>(graph: &Workflow<S>, pi: &EdgeMap<S>) -> Result<EdgeMap<S>, GraphError> {
    let reach = reach_weights(graph)?;
    Ok(graph.edges().map(|e| (e, pi.value(e) * reach[&e.dst])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::Edge;

    fn weights(g: &Workflow<f64>) -> EdgeMap<f64> {
        init_weights(g, &g.propagate_valuations().unwrap()).unwrap()
    }

    #[test]
    fn fan_weights() {
        let w = weights(&fan(2.0, 1.0));
        assert_eq!(w.value(Edge { src: S1, dst: V1 }), 4.0);
        assert_eq!(w.value(Edge { src: S2, dst: V1 }), 2.0);
        assert_eq!(w.value(Edge { src: V1, dst: T1 }), 3.0);
        assert_eq!(w.value(Edge { src: V1, dst: T2 }), 3.0);
    }

    #[test]
    fn purpose_weights_scale_upstream_edges() {
        let mut g = fan(2.0, 1.0);
        g.set_purpose_weight(T1, 2.0);
        let w = weights(&g);
        // reachable weight from v1 is 2 + 1
        assert_eq!(w.value(Edge { src: S1, dst: V1 }), 3.0 * 2.0);
        assert_eq!(w.value(Edge { src: V1, dst: T1 }), 3.0 * 2.0);
        assert_eq!(w.value(Edge { src: V1, dst: T2 }), 3.0);
    }

    #[test]
    fn zero_weight_purpose_gives_zero_edge() {
        let mut g = fan(2.0, 1.0);
        g.set_purpose_weight(T2, 0.0);
        let w = weights(&g);
        assert_eq!(w.value(Edge { src: V1, dst: T2 }), 0.0);
        assert_eq!(w.value(Edge { src: V1, dst: T1 }), 3.0);
    }

    #[test]
    fn many_purposes_span_several_words() {
        let mut g = Workflow::<f64>::new();
        let u = g.add_user(0).unwrap();
        let a = g.add_algorithm(1).unwrap();
        g.add_edge(u, a).unwrap();
        for i in 0..130 {
            let p = g.add_purpose(10 + i, 1.0).unwrap();
            g.add_edge(a, p).unwrap();
        }
        let r = reach_weights(&g).unwrap();
        assert_eq!(r[&u], 130.0);
        assert_eq!(r[&VertexId(75)], 1.0);
    }
}
