//! Full consistency audit of a walk index against its graph.
//!
//! This is the structural oracle for everything the maintenance procedures
//! promise: path validity, the walk-step/record bijection, counters, the
//! walk-count targets and the active-edge registry. It is O(index size) and
//! meant for tests, benches and post-run verification, not for hot paths.

use super::{CrossingRecord, WalkIndex};
use crate::graph::{DynGraph, NodeId};

impl WalkIndex {
    /// Check every structural invariant; returns human-readable violations,
    /// empty when the index is consistent with `graph`.
    pub fn audit(&self, graph: &DynGraph) -> Vec<String> {
        let mut out = Vec::new();
        let n = graph.node_count();
        if self.by_source.len() != n || self.stores.len() != n {
            out.push(format!(
                "index sized for {} nodes, graph has {n}",
                self.by_source.len()
            ));
            return out;
        }

        let mut live = 0usize;
        let mut step_total = 0usize;
        for (id, walk) in self.iter_walks() {
            live += 1;
            step_total += walk.hops();
            if walk.path.len() < 2 {
                out.push(format!("walk {}: fewer than one hop", id.0));
                continue;
            }
            if walk.steps.len() != walk.hops() {
                out.push(format!("walk {}: step refs out of sync with path", id.0));
                continue;
            }
            let src = walk.source();
            match self.by_source[src.index()].get(walk.src_slot as usize) {
                Some(&listed) if listed == id => {}
                _ => out.push(format!("walk {}: source slot broken at node {src}", id.0)),
            }
            for (i, pair) in walk.path.windows(2).enumerate() {
                let (from, to) = (pair[0], pair[1]);
                let sref = walk.steps[i];
                if sref.dangling {
                    if from != to || !graph.is_dangling(from) {
                        out.push(format!(
                            "walk {} step {i}: dangling step at non-dangling node {from}",
                            id.0
                        ));
                        continue;
                    }
                    match self.stores[from.index()].dangling.get(sref.slot as usize) {
                        Some(&rec)
                            if rec
                                == CrossingRecord {
                                    walk: id,
                                    step: i as u32,
                                } => {}
                        _ => out.push(format!(
                            "walk {} step {i}: dangling record missing at node {from}",
                            id.0
                        )),
                    }
                } else {
                    if !graph.has_edge(from, to) {
                        out.push(format!(
                            "walk {} step {i}: edge ({from}, {to}) not in graph",
                            id.0
                        ));
                        continue;
                    }
                    let found = self
                        .records_on_edge(from, to)
                        .and_then(|recs| recs.get(sref.slot as usize).copied());
                    match found {
                        Some(rec)
                            if rec
                                == CrossingRecord {
                                    walk: id,
                                    step: i as u32,
                                } => {}
                        _ => out.push(format!(
                            "walk {} step {i}: record missing on edge ({from}, {to})",
                            id.0
                        )),
                    }
                }
            }
        }
        if live != self.live_walks {
            out.push(format!(
                "live walk counter {} but {live} walks stored",
                self.live_walks
            ));
        }

        let mut record_total = 0usize;
        for u in graph.nodes() {
            let store = &self.stores[u.index()];
            let have = self.by_source[u.index()].len();
            let want = self.target_walks(graph.out_degree(u));
            if have != want {
                out.push(format!(
                    "node {u}: holds {have} walks, degree {} requires {want}",
                    graph.out_degree(u)
                ));
            }
            for &id in &self.by_source[u.index()] {
                match self.walks.get(id.index()).and_then(|w| w.as_ref()) {
                    Some(w) if w.source() == u => {}
                    _ => out.push(format!(
                        "node {u}: source list references bad walk {}",
                        id.0
                    )),
                }
            }
            let mut per_node_records = store.dangling.len();
            if !store.dangling.is_empty() && !graph.is_dangling(u) {
                out.push(format!("node {u}: dangling bucket nonempty at degree > 0"));
            }
            for rec in &store.dangling {
                if !self.record_backref_ok(rec, u, true) {
                    out.push(format!(
                        "node {u}: dangling record ({}, {}) not owned by its walk",
                        rec.walk.0, rec.step
                    ));
                }
            }
            if store.active.len() != store.active_pos.len() {
                out.push(format!(
                    "node {u}: active registry and slot lookup disagree"
                ));
            }
            for (slot, edge) in store.active.iter().enumerate() {
                if store.active_pos.get(&edge.to.0).copied() != Some(slot as u32) {
                    out.push(format!(
                        "node {u}: active edge ({u}, {}) mis-slotted",
                        edge.to
                    ));
                }
                if edge.recs.is_empty() {
                    out.push(format!(
                        "node {u}: empty record list kept active for {}",
                        edge.to
                    ));
                }
                if !graph.has_edge(u, edge.to) {
                    out.push(format!(
                        "node {u}: records held for missing edge ({u}, {})",
                        edge.to
                    ));
                }
                per_node_records += edge.recs.len();
                for rec in &edge.recs {
                    if !self.record_backref_ok(rec, u, false) {
                        out.push(format!(
                            "node {u}: record ({}, {}) on edge ({u}, {}) not owned by its walk",
                            rec.walk.0, rec.step, edge.to
                        ));
                    }
                }
            }
            if store.cross_count != per_node_records as u64 {
                out.push(format!(
                    "node {u}: cross count {} but {per_node_records} records stored",
                    store.cross_count
                ));
            }
            record_total += per_node_records;
        }
        if record_total != step_total {
            out.push(format!(
                "{record_total} records stored for {step_total} walk steps"
            ));
        }
        out
    }

    /// A container-side record must point at a live walk whose step `rec.step`
    /// leaves `at` through this very container.
    fn record_backref_ok(&self, rec: &CrossingRecord, at: NodeId, dangling: bool) -> bool {
        let Some(walk) = self.walks.get(rec.walk.index()).and_then(|w| w.as_ref()) else {
            return false;
        };
        let step = rec.step as usize;
        if step >= walk.hops() {
            return false;
        }
        walk.path[step] == at && walk.steps[step].dangling == dangling
    }
}
