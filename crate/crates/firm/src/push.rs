//! Forward-push: deterministic local propagation of probability mass from a
//! source node into a settled part (the reserve) and an unsettled part (the
//! residue).
//!
//! Throughout the run the vectors satisfy
//! `pi(s,t) = reserve(t) + sum_v residue(v) * pi(v,t)` for every target `t`,
//! and on exit every node obeys `residue(u) / d(u) < r_max` with dangling
//! residues fully converted, so total mass is conserved exactly.

use std::collections::VecDeque;

use crate::graph::{DynGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushParams {
    /// Walk stop probability in (0,1).
    pub alpha: f64,
    /// Residue-per-degree threshold, > 0.
    pub r_max: f64,
}

/// Sparse push output; both vectors are sorted by node id.
#[derive(Debug, Clone)]
pub struct PushResult {
    pub reserve: Vec<(NodeId, f64)>,
    pub residue: Vec<(NodeId, f64)>,
}

impl PushResult {
    pub fn reserve_at(&self, t: NodeId) -> f64 {
        lookup(&self.reserve, t)
    }

    pub fn residue_at(&self, t: NodeId) -> f64 {
        lookup(&self.residue, t)
    }

    pub fn mass(&self) -> f64 {
        self.reserve.iter().map(|(_, x)| x).sum::<f64>()
            + self.residue.iter().map(|(_, x)| x).sum::<f64>()
    }
}

fn lookup(entries: &[(NodeId, f64)], t: NodeId) -> f64 {
    entries
        .binary_search_by_key(&t, |&(v, _)| v)
        .map(|i| entries[i].1)
        .unwrap_or(0.0)
}

pub fn forward_push(graph: &DynGraph, source: NodeId, params: &PushParams) -> PushResult {
    forward_push_observed(graph, source, params, |_, _| {})
}

/// Forward-push invoking `observer(reserve, residue)` (dense slices) after
/// every push step. The plain entry point passes a no-op closure, which
/// compiles away.
pub fn forward_push_observed(
    graph: &DynGraph,
    source: NodeId,
    params: &PushParams,
    mut observer: impl FnMut(&[f64], &[f64]),
) -> PushResult {
    assert!(
        params.alpha > 0.0 && params.alpha < 1.0,
        "alpha must be in (0,1)"
    );
    assert!(params.r_max > 0.0, "r_max must be positive");
    let n = graph.node_count();
    assert!(source.index() < n, "source out of range");

    let mut reserve = vec![0.0f64; n];
    let mut residue = vec![0.0f64; n];
    let mut queued = vec![false; n];
    let mut queue: VecDeque<u32> = VecDeque::new();

    residue[source.index()] = 1.0;
    if eligible(graph, source, 1.0, params.r_max) {
        queue.push_back(source.0);
        queued[source.index()] = true;
    }

    while let Some(u) = queue.pop_front() {
        let u = NodeId(u);
        queued[u.index()] = false;
        let r_u = residue[u.index()];
        if !eligible(graph, u, r_u, params.r_max) {
            continue;
        }
        let degree = graph.out_degree(u);
        if degree == 0 {
            // Dangling: all mass a walk carries here stays here, so the
            // whole residue settles at once.
            reserve[u.index()] += r_u;
            residue[u.index()] = 0.0;
        } else {
            reserve[u.index()] += params.alpha * r_u;
            let share = (1.0 - params.alpha) * r_u / degree as f64;
            residue[u.index()] = 0.0;
            for &v in graph.neighbors(u) {
                residue[v.index()] += share;
                if !queued[v.index()] && eligible(graph, v, residue[v.index()], params.r_max) {
                    queue.push_back(v.0);
                    queued[v.index()] = true;
                }
            }
            // A self-loop at u refills its own residue.
            if queued[u.index()] {
                continue;
            }
            if eligible(graph, u, residue[u.index()], params.r_max) {
                queue.push_back(u.0);
                queued[u.index()] = true;
            }
        }
        observer(&reserve, &residue);
    }

    PushResult {
        reserve: sparsify(&reserve),
        residue: sparsify(&residue),
    }
}

#[inline]
fn eligible(graph: &DynGraph, u: NodeId, r: f64, r_max: f64) -> bool {
    let d = graph.out_degree(u);
    if d == 0 {
        r > 0.0
    } else {
        r >= r_max * d as f64
    }
}

fn sparsify(dense: &[f64]) -> Vec<(NodeId, f64)> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, &x)| (NodeId(i as u32), x))
        .collect()
}
