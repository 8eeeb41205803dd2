//! Ground-truth and baseline computations.
//!
//! Everything here is dense and deliberately simple: it exists to validate
//! the engine and to serve as a latency baseline, not to scale. Dangling
//! nodes keep their mass (implicit self-loop), mirroring the push solver so
//! invariant checks are exact.

use crate::error::{Error, Result};
use crate::graph::{DynGraph, NodeId};
use crate::index::WalkIndex;
use crate::params::ApproxParams;
use crate::push::{forward_push, PushParams};
use crate::query::SsprResult;
use crate::rng::RandomSource;

/// Dense-oracle size policy.
pub const MAX_ORACLE_NODES: usize = 100_000;

#[derive(Debug, Clone)]
pub struct PprVector {
    pub source: NodeId,
    pub values: Vec<f64>,
    pub rounds: usize,
}

impl PprVector {
    pub fn get(&self, t: NodeId) -> f64 {
        self.values[t.index()]
    }

    /// Indices sorted by descending score (ties by ascending node id).
    pub fn ranking(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = (0..self.values.len() as u32).map(NodeId).collect();
        order.sort_by(|a, b| {
            self.values[b.index()]
                .partial_cmp(&self.values[a.index()])
                .unwrap()
                .then(a.0.cmp(&b.0))
        });
        order
    }
}

pub fn check_oracle_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_NODES {
        return Err(Error::OracleTooLarge {
            n,
            max: MAX_ORACLE_NODES,
        });
    }
    Ok(())
}

/// Power iteration on `pi = alpha·e_s + (1-alpha)·pi·D^{-1}A`; after `rounds`
/// applications the remaining error is at most `(1-alpha)^rounds`.
pub fn power_iteration(graph: &DynGraph, source: NodeId, alpha: f64, rounds: usize) -> PprVector {
    assert!(rounds >= 1);
    let n = graph.node_count();
    let mut cur = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    cur[source.index()] = 1.0;
    let mut result = vec![0.0f64; n];
    for _ in 0..rounds {
        for x in next.iter_mut() {
            *x = 0.0;
        }
        for u in graph.nodes() {
            let mass = cur[u.index()];
            if mass == 0.0 {
                continue;
            }
            result[u.index()] += alpha * mass;
            let d = graph.out_degree(u);
            if d == 0 {
                next[u.index()] += (1.0 - alpha) * mass;
            } else {
                let share = (1.0 - alpha) * mass / d as f64;
                for &v in graph.neighbors(u) {
                    next[v.index()] += share;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    // Park the undistributed tail where it currently sits so mass sums to 1.
    for (r, c) in result.iter_mut().zip(&cur) {
        *r += c;
    }
    PprVector {
        source,
        values: result,
        rounds,
    }
}

/// Per-hop PPR vectors: entry `l` is the probability of stopping at each
/// node exactly at hop `l`. Partial sums converge to `power_iteration` from
/// below with tail at most `(1-alpha)^(max_hops+1)`.
pub fn hop_ppr(graph: &DynGraph, source: NodeId, alpha: f64, max_hops: usize) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut occupancy = vec![0.0f64; n];
    occupancy[source.index()] = 1.0;
    let mut hops = Vec::with_capacity(max_hops + 1);
    let mut decay = 1.0f64; // (1-alpha)^l
    for _ in 0..=max_hops {
        let layer: Vec<f64> = occupancy.iter().map(|&p| alpha * decay * p).collect();
        hops.push(layer);
        let mut next = vec![0.0f64; n];
        for u in graph.nodes() {
            let p = occupancy[u.index()];
            if p == 0.0 {
                continue;
            }
            let d = graph.out_degree(u);
            if d == 0 {
                next[u.index()] += p;
            } else {
                let share = p / d as f64;
                for &v in graph.neighbors(u) {
                    next[v.index()] += share;
                }
            }
        }
        occupancy = next;
        decay *= 1.0 - alpha;
    }
    hops
}

/// Terminal distribution of a walk conditioned on taking at least one hop:
/// `(pi(s,·) - pi^0(s,·)) / (1-alpha)`, enumerated to `max_hops` and
/// renormalized to absorb the truncated tail.
pub fn conditioned_terminal_distribution(
    graph: &DynGraph,
    source: NodeId,
    alpha: f64,
    max_hops: usize,
) -> Vec<f64> {
    let hops = hop_ppr(graph, source, alpha, max_hops);
    let n = graph.node_count();
    let mut dist = vec![0.0f64; n];
    for layer in hops.iter().skip(1) {
        for (d, x) in dist.iter_mut().zip(layer) {
            *d += x;
        }
    }
    let total: f64 = dist.iter().sum();
    assert!(total > 0.0, "source has no positive-hop mass");
    for d in dist.iter_mut() {
        *d /= total;
    }
    dist
}

/// Index-free estimation: forward push followed by fresh, unconditioned
/// walks for every residue node. Baseline for latency comparison and
/// cross-validation of the indexed query path.
pub fn fora_index_free(
    graph: &DynGraph,
    source: NodeId,
    params: &ApproxParams,
    rng: &mut impl RandomSource,
) -> SsprResult {
    let omega = params.omega();
    let push = forward_push(
        graph,
        source,
        &PushParams {
            alpha: params.alpha,
            r_max: params.r_max(),
        },
    );
    let n = graph.node_count();
    let mut estimates = vec![0.0f64; n];
    for &(t, p) in &push.reserve {
        estimates[t.index()] += p;
    }
    let mut walks_consumed = 0usize;
    for &(v, r) in &push.residue {
        let count = (r * omega).ceil() as usize;
        if count == 0 {
            estimates[v.index()] += r;
            continue;
        }
        walks_consumed += count;
        let share = r / count as f64;
        for _ in 0..count {
            let t = simulate_unconditioned_walk(graph, v, params.alpha, rng);
            estimates[t.index()] += share;
        }
    }
    SsprResult::from_dense(source, &estimates, walks_consumed)
}

fn simulate_unconditioned_walk(
    graph: &DynGraph,
    start: NodeId,
    alpha: f64,
    rng: &mut impl RandomSource,
) -> NodeId {
    let mut cur = start;
    loop {
        if rng.chance(alpha) {
            return cur;
        }
        let d = graph.out_degree(cur);
        if d > 0 {
            cur = graph.nth_neighbor(cur, rng.uniform_index(d));
        }
        // dangling: self-loop, stay at cur
    }
}

/// The rebuild-everything baseline: apply the edge update to the graph, then
/// sample a complete fresh index.
pub fn rebuild_baseline_update(
    graph: &mut DynGraph,
    edge: (NodeId, NodeId),
    insert: bool,
    alpha: f64,
    walk_budget: f64,
    rng: &mut impl RandomSource,
) -> Result<WalkIndex> {
    if insert {
        graph.insert_edge(edge.0, edge.1)?;
    } else {
        graph.delete_edge(edge.0, edge.1)?;
    }
    Ok(WalkIndex::build(graph, alpha, walk_budget, rng))
}
