//! Maximum flow and minimum s-t cut (Dinic).

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::GraphError;
use crate::graph::{Edge, EdgeMap, VertexId, Workflow};
use crate::scalar::Scalar;

/// Minimum cut between one source and one sink.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut<S> {
    pub cut_edges: BTreeSet<Edge>,
    pub cut_weight: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxFlow<S> {
    pub value: S,
    /// Remaining forward capacity of every graph edge.
    pub residual: EdgeMap<S>,
}

struct Arc<S> {
    to: usize,
    rev: usize,
    residual: S,
}

struct Network<S> {
    index: HashMap<VertexId, usize>,
    adj: Vec<Vec<Arc<S>>>,
    /// (vertex, slot) of the forward arc for each graph edge.
    forward: Vec<(Edge, usize, usize)>,
    eps: S,
}

impl<S: Scalar> Network<S> {
    fn build(graph: &Workflow<S>, cap: &EdgeMap<S>) -> Self {
        let index: HashMap<VertexId, usize> = graph.vertex_ids().enumerate().map(|(i, v)| (v, i)).collect();
        let mut adj: Vec<Vec<Arc<S>>> = (0..index.len()).map(|_| Vec::new()).collect();
        let mut forward = Vec::with_capacity(graph.edge_count());
        let mut largest = S::zero();
        for e in graph.edges() {
            let (u, v) = (index[&e.src], index[&e.dst]);
            let c = cap.value(e);
            largest = S::max_of(largest, c);
            let (fu, fv) = (adj[u].len(), adj[v].len());
            adj[u].push(Arc { to: v, rev: fv, residual: c });
            adj[v].push(Arc { to: u, rev: fu, residual: S::zero() });
            forward.push((e, u, fu));
        }
        Network { index, adj, forward, eps: S::slack(largest) }
    }

    fn open(&self, a: &Arc<S>) -> bool {
        a.residual > self.eps
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.adj[u] {
                if self.open(a) && level[a.to] == usize::MAX {
                    level[a.to] = level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        level
    }

    fn run(&mut self, s: usize, t: usize) -> S {
        let mut total = S::zero();
        loop {
            let mut level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; self.adj.len()];
            // each augmenting path is a list of (vertex, slot)
            'phase: loop {
                let mut path: Vec<(usize, usize)> = Vec::new();
                let mut u = s;
                while u != t {
                    let mut advanced = false;
                    while next[u] < self.adj[u].len() {
                        let a = &self.adj[u][next[u]];
                        if self.open(a) && level[a.to] != usize::MAX && level[a.to] == level[u] + 1 {
                            path.push((u, next[u]));
                            u = a.to;
                            advanced = true;
                            break;
                        }
                        next[u] += 1;
                    }
                    if advanced {
                        continue;
                    }
                    if u == s {
                        break 'phase;
                    }
                    level[u] = usize::MAX;
                    let (prev, slot) = path.pop().expect("non-empty below source");
                    u = prev;
                    next[u] = slot + 1;
                }
                let bottleneck = path
                    .iter()
                    .map(|&(v, slot)| self.adj[v][slot].residual)
                    .reduce(S::min_of)
                    .expect("s != t");
                for &(v, slot) in &path {
                    let (to, rev) = {
                        let a = &mut self.adj[v][slot];
                        a.residual -= bottleneck;
                        (a.to, a.rev)
                    };
                    self.adj[to][rev].residual += bottleneck;
                }
                total += bottleneck;
            }
        }
    }

    fn residual_of(&self, u: usize, slot: usize) -> S {
        let r = self.adj[u][slot].residual;
        if r > self.eps {
            r
        } else {
            S::zero()
        }
    }

    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in &self.adj[u] {
                if self.open(a) && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

fn endpoints<S: Scalar>(graph: &Workflow<S>, s: VertexId, t: VertexId) -> Result<(), GraphError> {
    for v in [s, t] {
        if !graph.contains_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
    }
    if s == t {
        return Err(GraphError::SameEndpoints(s));
    }
    Ok(())
}

fn solve<S: Scalar>(graph: &Workflow<S>, cap: &EdgeMap<S>, s: VertexId, t: VertexId) -> Result<(Network<S>, S), GraphError> {
    endpoints(graph, s, t)?;
    let mut net = Network::build(graph, cap);
    let (si, ti) = (net.index[&s], net.index[&t]);
    let value = net.run(si, ti);
    Ok((net, value))
}

/// Maximum `s → t` flow under `cap` (missing capacities count as zero).
pub fn max_flow<S: Scalar>(graph: &Workflow<S>, cap: &EdgeMap<S>, s: VertexId, t: VertexId) -> Result<MaxFlow<S>, GraphError> {
    let (net, value) = solve(graph, cap, s, t)?;
    let residual = net
        .forward
        .iter()
        .map(|&(e, u, slot)| (e, net.residual_of(u, slot)))
        .collect();
    Ok(MaxFlow { value, residual })
}

/// Minimum `s → t` cut: edges leaving the residual-reachable side of `s`
/// that still lie on some `s → t` path.
pub fn min_cut<S: Scalar>(graph: &Workflow<S>, cap: &EdgeMap<S>, s: VertexId, t: VertexId) -> Result<Cut<S>, GraphError> {
    let (net, _) = solve(graph, cap, s, t)?;
    let side = net.source_side(net.index[&s]);
    let useful = graph.ancestors(t);
    let cut_edges: BTreeSet<Edge> = net
        .forward
        .iter()
        .filter(|&&(e, _, _)| side[net.index[&e.src]] && !side[net.index[&e.dst]] && useful.contains(&e.dst))
        .map(|&(e, _, _)| e)
        .collect();
    let cut_weight = cut_edges.iter().map(|&e| cap.value(e)).sum();
    Ok(Cut { cut_edges, cut_weight })
}
