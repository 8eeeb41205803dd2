//! Incremental index maintenance for edge insertions and deletions.
//!
//! Both procedures assume the graph mutation has already been applied and
//! the index is consistent with the *previous* graph. The work done per
//! update is proportional to the number of walks actually affected, which is
//! expected O(1) under the random arrival model.

use std::collections::{HashMap, HashSet};

use super::{CrossingRecord, WalkId, WalkIndex};
use crate::graph::{DynGraph, NodeId};
use crate::rng::RandomSource;

/// Per-update accounting, used for benchmarking and for the constant-cost
/// checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    /// Existing walks rerouted through a newly inserted edge.
    pub redirected: usize,
    /// Existing walks re-simulated after losing an edge.
    pub restarted: usize,
    /// Fresh walks appended to meet the new walk-count target.
    pub appended: usize,
    /// Walks removed to meet the new walk-count target.
    pub trimmed: usize,
}

impl UpdateStats {
    /// Walks whose path was modified by the update (the quantity the
    /// expected-constant-cost bound speaks about).
    pub fn touched(&self) -> usize {
        self.redirected + self.restarted
    }
}

impl WalkIndex {
    /// Select crossing records at `u` for insertion handling. Draws
    /// `k ~ Binomial(cross_count(u), 1/new_degree)` and collects `k`
    /// *distinct* records, each picked as a uniformly random active out-edge
    /// of `u` followed by a uniformly random record within that edge's list
    /// (redrawing on repeats). The records must stay distinct: with a single
    /// active edge the draw is then exactly the independent per-record
    /// Bernoulli(1/new_degree) selection the unbiasedness of maintained
    /// walks rests on. Records of the same walk collapse to the earliest
    /// step afterwards, matching the crossing-order rule.
    ///
    /// Returns the selection sorted by walk id; empty when `k == 0`.
    pub fn edge_sampling(
        &self,
        u: NodeId,
        new_degree: usize,
        rng: &mut impl RandomSource,
    ) -> Vec<CrossingRecord> {
        let store = &self.stores[u.index()];
        debug_assert!(
            store.dangling.is_empty(),
            "edge sampling expects no dangling records"
        );
        let k = rng.binomial(store.cross_count, 1.0 / new_degree as f64);
        let mut picked: HashSet<(WalkId, u32)> = HashSet::new();
        while (picked.len() as u64) < k {
            let edge = &store.active[rng.uniform_index(store.active.len())];
            let rec = edge.recs[rng.uniform_index(edge.recs.len())];
            picked.insert((rec.walk, rec.step));
        }
        let mut earliest: HashMap<WalkId, u32> = HashMap::new();
        for (walk, step) in picked {
            earliest
                .entry(walk)
                .and_modify(|s| *s = (*s).min(step))
                .or_insert(step);
        }
        let mut selected: Vec<CrossingRecord> = earliest
            .into_iter()
            .map(|(walk, step)| CrossingRecord { walk, step })
            .collect();
        selected.sort_unstable_by_key(|r| r.walk);
        selected
    }

    /// Maintain the index after inserting edge `(u, v)`; `graph` must
    /// already contain the edge.
    ///
    /// If `u` was dangling before the insertion, every walk parked at `u` is
    /// rerouted through the new edge at its first parked step (the selection
    /// probability `1/d` degenerates to 1). Otherwise affected walks are
    /// chosen by [`WalkIndex::edge_sampling`] and rerouted through `(u, v)`
    /// at the sampled step. Finally fresh walks from `u` are appended until
    /// the walk-count target for the increased degree is met.
    pub fn update_insert(
        &mut self,
        graph: &DynGraph,
        u: NodeId,
        v: NodeId,
        rng: &mut impl RandomSource,
    ) -> UpdateStats {
        debug_assert!(graph.has_edge(u, v), "graph must hold the inserted edge");
        let d_new = graph.out_degree(u);
        let mut stats = UpdateStats::default();

        let selected: Vec<CrossingRecord> = if d_new == 1 {
            // u was dangling: consume the whole bucket, earliest step per walk.
            let mut earliest: HashMap<WalkId, u32> = HashMap::new();
            for rec in &self.stores[u.index()].dangling {
                earliest
                    .entry(rec.walk)
                    .and_modify(|s| *s = (*s).min(rec.step))
                    .or_insert(rec.step);
            }
            let mut sel: Vec<CrossingRecord> = earliest
                .into_iter()
                .map(|(walk, step)| CrossingRecord { walk, step })
                .collect();
            sel.sort_unstable_by_key(|r| r.walk);
            sel
        } else {
            self.edge_sampling(u, d_new, rng)
        };

        for rec in selected {
            self.redirect_and_restart(graph, rec.walk, rec.step as usize, v, rng);
            stats.redirected += 1;
        }
        debug_assert!(self.stores[u.index()].dangling.is_empty());

        let want = self.target_walks(d_new);
        while self.by_source[u.index()].len() < want {
            self.sample_walk_from(graph, u, rng);
            stats.appended += 1;
        }
        stats
    }

    /// Maintain the index after deleting edge `(u, v)`; `graph` must no
    /// longer contain the edge.
    ///
    /// First uniformly selected walks of `u` are dropped until the shrunk
    /// walk-count target is met; then every remaining walk with a record on
    /// `(u, v)` is restarted from the step where it reached `u` (earliest
    /// such step per walk). The edge's record list is gone afterwards.
    pub fn update_delete(
        &mut self,
        graph: &DynGraph,
        u: NodeId,
        v: NodeId,
        rng: &mut impl RandomSource,
    ) -> UpdateStats {
        debug_assert!(
            !graph.has_edge(u, v),
            "graph must no longer hold the deleted edge"
        );
        let mut stats = UpdateStats::default();

        let want = self.target_walks(graph.out_degree(u));
        while self.by_source[u.index()].len() > want {
            let list = &self.by_source[u.index()];
            let victim = list[rng.uniform_index(list.len())];
            self.remove_walk(victim);
            stats.trimmed += 1;
        }

        // Snapshot survivors on the deleted edge before restarts mutate it.
        let mut earliest: HashMap<WalkId, u32> = HashMap::new();
        if let Some(recs) = self.records_on_edge(u, v) {
            for rec in recs {
                earliest
                    .entry(rec.walk)
                    .and_modify(|s| *s = (*s).min(rec.step))
                    .or_insert(rec.step);
            }
        }
        let mut stale: Vec<CrossingRecord> = earliest
            .into_iter()
            .map(|(walk, step)| CrossingRecord { walk, step })
            .collect();
        stale.sort_unstable_by_key(|r| r.walk);

        for rec in stale {
            self.walk_restart(graph, rec.walk, rec.step as usize, rng);
            stats.restarted += 1;
        }
        debug_assert!(
            self.records_on_edge(u, v).is_none(),
            "deleted edge must end up recordless"
        );
        stats
    }

    /// Re-simulate the suffix of a walk from `from_step` on the current
    /// graph, preserving its total hop count. Keeps `path[0..=from_step]`;
    /// `from_step == hops` is a no-op. Walk lengths are i.i.d. geometric and
    /// independent of the graph, so reusing the prior length keeps stored
    /// walks distributed like fresh ones.
    pub fn walk_restart(
        &mut self,
        graph: &DynGraph,
        id: WalkId,
        from_step: usize,
        rng: &mut impl RandomSource,
    ) {
        let hops = self.walk(id).hops();
        assert!(
            from_step <= hops,
            "restart step {from_step} beyond walk length {hops}"
        );
        self.truncate_suffix(id, from_step);
        self.regrow(graph, id, hops, rng);
    }

    /// Force a walk through edge `(path[step], forced)` at `step`, then
    /// restart the remainder.
    fn redirect_and_restart(
        &mut self,
        graph: &DynGraph,
        id: WalkId,
        step: usize,
        forced: NodeId,
        rng: &mut impl RandomSource,
    ) {
        let hops = self.walk(id).hops();
        debug_assert!(step < hops);
        self.truncate_suffix(id, step);
        self.append_step(graph, id, forced);
        self.regrow(graph, id, hops, rng);
    }

    /// Drop the walk's steps at and after `from_step`, records included.
    fn truncate_suffix(&mut self, id: WalkId, from_step: usize) {
        let hops = self.walk(id).hops();
        for step in from_step..hops {
            self.remove_record(id, step);
        }
        let walk = self.walks[id.index()].as_mut().expect("live walk");
        walk.path.truncate(from_step + 1);
        walk.steps.truncate(from_step);
    }

    /// Append one step to the walk's tail, recording it in the container
    /// matching the current graph.
    fn append_step(&mut self, graph: &DynGraph, id: WalkId, next: NodeId) {
        let walk = self.walks[id.index()].as_ref().expect("live walk");
        let from = walk.terminal();
        let step = walk.hops() as u32;
        let sref = self.push_record(graph, from, next, CrossingRecord { walk: id, step });
        let walk = self.walks[id.index()].as_mut().unwrap();
        walk.path.push(next);
        walk.steps.push(sref);
    }

    /// Extend the walk with uniform hops (staying put at dangling nodes)
    /// until it has `target_hops` hops again. Consumes one
    /// `uniform_index(d)` per non-dangling extension step and no stop draws.
    fn regrow(
        &mut self,
        graph: &DynGraph,
        id: WalkId,
        target_hops: usize,
        rng: &mut impl RandomSource,
    ) {
        while self.walk(id).hops() < target_hops {
            let cur = self.walk(id).terminal();
            let d = graph.out_degree(cur);
            let next = if d == 0 {
                cur
            } else {
                graph.nth_neighbor(cur, rng.uniform_index(d))
            };
            self.append_step(graph, id, next);
        }
    }
}
