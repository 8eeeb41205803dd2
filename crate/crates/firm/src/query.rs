//! Approximate single-source and top-k PPR queries over push + walk index.
//!
//! The estimate for a target `t` is
//!
//! ```text
//! pi~(s,t) = reserve(t) + sum_v residue(v) * ( alpha·[v = t]
//!            + (1-alpha) · terminals_at_t(v) / n_v )
//! ```
//!
//! where `n_v = ceil(residue(v) * omega)` stored walks of `v` are consumed.
//! The zero-hop part of a walk from `v` is certain (probability `alpha` of
//! stopping at `v`), so only positive-hop behavior is estimated from walks.
//! Queries draw no randomness: walks are consumed in ascending id order and
//! each walk is used at most once per query.

use crate::error::{Error, Result};
use crate::graph::{DynGraph, NodeId};
use crate::index::{WalkId, WalkIndex};
use crate::params::ApproxParams;
use crate::push::{forward_push, PushParams, PushResult};

/// Sparse single-source estimate, sorted by node id.
#[derive(Debug, Clone)]
pub struct SsprResult {
    pub source: NodeId,
    pub estimates: Vec<(NodeId, f64)>,
    pub walks_consumed: usize,
}

impl SsprResult {
    pub fn from_dense(source: NodeId, dense: &[f64], walks_consumed: usize) -> Self {
        let estimates = dense
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(i, &x)| (NodeId(i as u32), x))
            .collect();
        Self {
            source,
            estimates,
            walks_consumed,
        }
    }

    pub fn get(&self, t: NodeId) -> f64 {
        self.estimates
            .binary_search_by_key(&t, |&(v, _)| v)
            .map(|i| self.estimates[i].1)
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.estimates.iter().map(|(_, x)| x).sum()
    }
}

/// Ranked top-k answer; scores are non-increasing.
#[derive(Debug, Clone)]
pub struct TopKResult {
    pub ranked: Vec<(NodeId, f64)>,
    pub rounds: usize,
    /// Stored walks consumed across all refinement rounds.
    pub walks_consumed: usize,
}

impl TopKResult {
    pub fn walks_consumed(&self) -> usize {
        self.walks_consumed
    }
}

/// Full approximate single-source PPR query at the index's guarantee level.
pub fn query_sspr(
    graph: &DynGraph,
    index: &WalkIndex,
    source: NodeId,
    params: &ApproxParams,
) -> Result<SsprResult> {
    let push = forward_push(
        graph,
        source,
        &PushParams {
            alpha: params.alpha,
            r_max: params.r_max(),
        },
    );
    refine(graph, index, source, &push, params.omega(), params.alpha)
}

/// Combine a push result with indexed walks at `omega` walks per unit
/// residue.
fn refine(
    graph: &DynGraph,
    index: &WalkIndex,
    source: NodeId,
    push: &PushResult,
    omega: f64,
    alpha: f64,
) -> Result<SsprResult> {
    let n = graph.node_count();
    let mut estimates = vec![0.0f64; n];
    for &(t, p) in &push.reserve {
        estimates[t.index()] += p;
    }
    let mut walks_consumed = 0usize;
    let mut scratch: Vec<WalkId> = Vec::new();
    for &(v, r) in &push.residue {
        estimates[v.index()] += alpha * r;
        let need = (r * omega).ceil() as usize;
        if need == 0 {
            estimates[v.index()] += (1.0 - alpha) * r;
            continue;
        }
        let have = index.walks_from(v);
        if need > have.len() {
            return Err(Error::IndexUnderflow {
                node: v.0,
                need,
                have: have.len(),
            });
        }
        debug_assert!(
            need <= index.target_walks(graph.out_degree(v)),
            "push exit bound must keep walk demand within the per-degree budget"
        );
        scratch.clear();
        scratch.extend_from_slice(have);
        scratch.sort_unstable();
        let share = (1.0 - alpha) * r / need as f64;
        for &id in &scratch[..need] {
            estimates[index.walk(id).terminal().index()] += share;
        }
        walks_consumed += need;
    }
    Ok(SsprResult::from_dense(source, &estimates, walks_consumed))
}

/// Approximate top-k query by iterative refinement: round `i` runs the
/// single-source machinery at threshold `delta_i = max(delta, 2^-i)` with a
/// per-round failure budget `p_f / ceil(log2(1/delta))`, and stops once the
/// k-th largest lower bound `pi~ / (1+epsilon)` clears `delta_i` (or the
/// final threshold is reached).
pub fn query_topk(
    graph: &DynGraph,
    index: &WalkIndex,
    source: NodeId,
    k: usize,
    params: &ApproxParams,
) -> Result<TopKResult> {
    let n = graph.node_count();
    assert!(k >= 1 && k <= n, "k must be in 1..=n");
    let round_cap = (1.0 / params.delta).log2().ceil().max(1.0);
    let p_f_round = params.p_f / round_cap;
    let mut rounds = 0usize;
    let mut walks_consumed = 0usize;
    let mut level = 1i32;
    loop {
        let delta_i = params.delta.max(0.5f64.powi(level));
        let omega_i = ApproxParams::omega_for(params.epsilon, delta_i, p_f_round);
        let r_max_i = params.beta / (params.alpha * omega_i);
        let push = forward_push(
            graph,
            source,
            &PushParams {
                alpha: params.alpha,
                r_max: r_max_i,
            },
        );
        let est = refine(graph, index, source, &push, omega_i, params.alpha)?;
        rounds += 1;
        walks_consumed += est.walks_consumed;
        let ranked = rank_top_k(&est, n, k);
        let kth_lower = ranked.last().map_or(0.0, |&(_, x)| x) / (1.0 + params.epsilon);
        if kth_lower >= delta_i || delta_i <= params.delta {
            return Ok(TopKResult {
                ranked,
                rounds,
                walks_consumed,
            });
        }
        level += 1;
    }
}

/// Top `k` of an estimate by (score desc, node id asc); nodes without an
/// estimate count as zero.
fn rank_top_k(est: &SsprResult, n: usize, k: usize) -> Vec<(NodeId, f64)> {
    let mut ranked: Vec<(NodeId, f64)> = est.estimates.clone();
    if ranked.len() < k {
        // pad with zero-score nodes in id order
        let mut present = vec![false; n];
        for &(v, _) in &ranked {
            present[v.index()] = true;
        }
        for (i, &used) in present.iter().enumerate() {
            if ranked.len() >= k {
                break;
            }
            if !used {
                ranked.push((NodeId(i as u32), 0.0));
            }
        }
    }
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0 .0.cmp(&b.0 .0)));
    ranked.truncate(k);
    ranked
}
