//! The random-walk index and its auxiliary structures.
//!
//! For every node `u` with out-degree `d(u) >= 1` the index holds exactly
//! `ceil(d(u) * walk_budget)` stored walks starting at `u`, where
//! `walk_budget = r_max * omega`. Stored walks are conditioned on taking at
//! least one hop; the zero-hop case is certain (probability `alpha` of
//! stopping at the source) and is accounted for analytically at query time.
//!
//! Every step of every walk is covered by exactly one crossing record
//! `(walk id, step)`. Records for a step that traverses a real edge live in
//! that edge's record list; steps taken at a dangling node (the implicit
//! self-loop) live in the node's dangling bucket. Record lists support
//! swap-remove, and each walk keeps a per-step back-reference to its
//! record's slot, so detaching a walk is O(length). Per node we also keep
//! the total crossing count and a compact registry of *active* out-edges
//! (those with a nonempty record list) with a slot lookup, which is what
//! makes uniform active-edge sampling O(1) during insertion handling.

mod audit;
mod snapshot;
mod update;

pub use update::UpdateStats;

use std::collections::HashMap;

use crate::graph::{DynGraph, NodeId};
use crate::rng::RandomSource;

/// Stable identifier of a stored walk. Ids of removed walks may be reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct WalkId(pub u32);

impl WalkId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A walk leaves some node at some step; records are grouped per edge (or
/// per dangling bucket), so the leaving node is implied by the container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingRecord {
    pub walk: WalkId,
    pub step: u32,
}

/// Back-reference from a walk step to the slot holding its record.
#[derive(Debug, Clone, Copy)]
struct StepRef {
    dangling: bool,
    slot: u32,
}

/// A stored random-walk path. `path[0]` is the source; `hops = path.len()-1`
/// is always at least 1.
#[derive(Debug, Clone)]
pub struct Walk {
    path: Vec<NodeId>,
    steps: Vec<StepRef>,
    src_slot: u32,
}

impl Walk {
    pub fn path(&self) -> &[NodeId] {
        &self.path
    }

    pub fn source(&self) -> NodeId {
        self.path[0]
    }

    pub fn terminal(&self) -> NodeId {
        *self.path.last().unwrap()
    }

    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

/// Record list of one (existing) out-edge.
#[derive(Debug, Clone)]
struct EdgeRecords {
    to: NodeId,
    recs: Vec<CrossingRecord>,
}

/// Per-node auxiliary state: active out-edge registry, dangling bucket and
/// the crossing counter.
#[derive(Debug, Clone, Default)]
struct NodeStore {
    active: Vec<EdgeRecords>,
    active_pos: HashMap<u32, u32>,
    dangling: Vec<CrossingRecord>,
    cross_count: u64,
}

#[derive(Debug, Clone)]
pub struct WalkIndex {
    alpha: f64,
    walk_budget: f64,
    walks: Vec<Option<Walk>>,
    free_ids: Vec<WalkId>,
    by_source: Vec<Vec<WalkId>>,
    stores: Vec<NodeStore>,
    live_walks: usize,
}

impl WalkIndex {
    /// Sample a complete index for `graph`: `ceil(d(u) * walk_budget)` walks
    /// per node, created in ascending node order so walk ids are
    /// reproducible under a scripted source.
    pub fn build(
        graph: &DynGraph,
        alpha: f64,
        walk_budget: f64,
        rng: &mut impl RandomSource,
    ) -> Self {
        assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0,1)");
        assert!(walk_budget > 0.0, "walk budget must be positive");
        let n = graph.node_count();
        let mut index = Self {
            alpha,
            walk_budget,
            walks: Vec::new(),
            free_ids: Vec::new(),
            by_source: vec![Vec::new(); n],
            stores: vec![NodeStore::default(); n],
            live_walks: 0,
        };
        for u in graph.nodes() {
            let want = index.target_walks(graph.out_degree(u));
            for _ in 0..want {
                index.sample_walk_from(graph, u, rng);
            }
        }
        index
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn walk_budget(&self) -> f64 {
        self.walk_budget
    }

    /// Required number of stored walks for a node of out-degree `d`.
    pub fn target_walks(&self, d: usize) -> usize {
        (d as f64 * self.walk_budget).ceil() as usize
    }

    pub fn walk_count(&self) -> usize {
        self.live_walks
    }

    /// Ids of the stored walks starting at `u`, in arbitrary order.
    pub fn walks_from(&self, u: NodeId) -> &[WalkId] {
        &self.by_source[u.index()]
    }

    pub fn walk(&self, id: WalkId) -> &Walk {
        self.walks[id.index()].as_ref().expect("live walk id")
    }

    /// Total crossing records at `u` (all out-edge lists plus the dangling
    /// bucket).
    pub fn cross_count(&self, u: NodeId) -> u64 {
        self.stores[u.index()].cross_count
    }

    /// Number of out-edges of `u` that currently hold at least one record.
    pub fn active_edge_count(&self, u: NodeId) -> usize {
        self.stores[u.index()].active.len()
    }

    /// Records stored on edge `(u, v)`, if that edge is active.
    pub fn records_on_edge(&self, u: NodeId, v: NodeId) -> Option<&[CrossingRecord]> {
        let store = &self.stores[u.index()];
        store
            .active_pos
            .get(&v.0)
            .map(|&i| store.active[i as usize].recs.as_slice())
    }

    pub fn dangling_records(&self, u: NodeId) -> &[CrossingRecord] {
        &self.stores[u.index()].dangling
    }

    pub fn iter_walks(&self) -> impl Iterator<Item = (WalkId, &Walk)> {
        self.walks
            .iter()
            .enumerate()
            .filter_map(|(i, w)| w.as_ref().map(|w| (WalkId(i as u32), w)))
    }

    // ---- internal structure maintenance ----

    fn alloc_id(&mut self) -> WalkId {
        if let Some(id) = self.free_ids.pop() {
            id
        } else {
            self.walks.push(None);
            WalkId((self.walks.len() - 1) as u32)
        }
    }

    /// Append the record for one walk step into the right container and
    /// return the step back-reference.
    fn push_record(
        &mut self,
        graph: &DynGraph,
        from: NodeId,
        to: NodeId,
        rec: CrossingRecord,
    ) -> StepRef {
        let store = &mut self.stores[from.index()];
        store.cross_count += 1;
        if graph.is_dangling(from) {
            debug_assert_eq!(from, to, "dangling step must stay in place");
            store.dangling.push(rec);
            StepRef {
                dangling: true,
                slot: (store.dangling.len() - 1) as u32,
            }
        } else {
            debug_assert!(
                graph.has_edge(from, to),
                "step must follow an existing edge"
            );
            let edge_idx = match store.active_pos.get(&to.0) {
                Some(&i) => i as usize,
                None => {
                    store.active_pos.insert(to.0, store.active.len() as u32);
                    store.active.push(EdgeRecords {
                        to,
                        recs: Vec::new(),
                    });
                    store.active.len() - 1
                }
            };
            let recs = &mut store.active[edge_idx].recs;
            recs.push(rec);
            StepRef {
                dangling: false,
                slot: (recs.len() - 1) as u32,
            }
        }
    }

    /// Remove the record of `(id, step)` from its container, patching the
    /// back-reference of whichever record the swap-remove moved.
    fn remove_record(&mut self, id: WalkId, step: usize) {
        let walk = self.walks[id.index()].as_ref().expect("live walk");
        let from = walk.path[step];
        let to = walk.path[step + 1];
        let sref = walk.steps[step];
        let store = &mut self.stores[from.index()];
        store.cross_count -= 1;
        let moved = if sref.dangling {
            let bucket = &mut store.dangling;
            debug_assert_eq!(
                bucket[sref.slot as usize],
                CrossingRecord {
                    walk: id,
                    step: step as u32
                }
            );
            bucket.swap_remove(sref.slot as usize);
            bucket.get(sref.slot as usize).copied()
        } else {
            let edge_idx = store.active_pos[&to.0] as usize;
            let recs = &mut store.active[edge_idx].recs;
            debug_assert_eq!(
                recs[sref.slot as usize],
                CrossingRecord {
                    walk: id,
                    step: step as u32
                }
            );
            recs.swap_remove(sref.slot as usize);
            let moved = recs.get(sref.slot as usize).copied();
            if recs.is_empty() {
                // Deactivate the edge: compact registry + slot lookup fixup.
                store.active_pos.remove(&to.0);
                store.active.swap_remove(edge_idx);
                if edge_idx < store.active.len() {
                    let relocated = store.active[edge_idx].to;
                    store.active_pos.insert(relocated.0, edge_idx as u32);
                }
            }
            moved
        };
        if let Some(m) = moved {
            let w = self.walks[m.walk.index()]
                .as_mut()
                .expect("moved record has live walk");
            w.steps[m.step as usize].slot = sref.slot;
        }
    }

    /// Register a freshly sampled path as a stored walk.
    fn install_walk(&mut self, graph: &DynGraph, path: Vec<NodeId>) -> WalkId {
        debug_assert!(path.len() >= 2, "stored walks take at least one hop");
        let id = self.alloc_id();
        let src = path[0];
        let src_slot = self.by_source[src.index()].len() as u32;
        self.by_source[src.index()].push(id);
        self.walks[id.index()] = Some(Walk {
            path: Vec::new(),
            steps: Vec::new(),
            src_slot,
        });
        let mut steps = Vec::with_capacity(path.len() - 1);
        for (i, pair) in path.windows(2).enumerate() {
            steps.push(self.push_record(
                graph,
                pair[0],
                pair[1],
                CrossingRecord {
                    walk: id,
                    step: i as u32,
                },
            ));
        }
        let walk = self.walks[id.index()].as_mut().unwrap();
        walk.path = path;
        walk.steps = steps;
        self.live_walks += 1;
        id
    }

    /// Detach a walk entirely: all its records, its source-list slot, and
    /// finally its id (which becomes reusable).
    fn remove_walk(&mut self, id: WalkId) {
        let hops = self.walk(id).hops();
        for step in 0..hops {
            self.remove_record(id, step);
        }
        let walk = self.walks[id.index()].take().expect("live walk");
        let src_list = &mut self.by_source[walk.source().index()];
        let slot = walk.src_slot as usize;
        debug_assert_eq!(src_list[slot], id);
        src_list.swap_remove(slot);
        if let Some(&moved) = src_list.get(slot) {
            self.walks[moved.index()].as_mut().unwrap().src_slot = slot as u32;
        }
        self.free_ids.push(id);
        self.live_walks -= 1;
    }

    /// Sample one conditioned walk from `u`: the first hop is forced
    /// (uniform out-neighbor), afterwards the walk stops with probability
    /// `alpha` and otherwise takes a uniform hop (staying put at a dangling
    /// node).
    ///
    /// Draw order: `uniform_index(d(u))`, then per position
    /// `chance(alpha)` and, when continuing from a non-dangling node,
    /// `uniform_index(d)`.
    fn sample_walk_from(
        &mut self,
        graph: &DynGraph,
        u: NodeId,
        rng: &mut impl RandomSource,
    ) -> WalkId {
        let d = graph.out_degree(u);
        assert!(d >= 1, "cannot start a stored walk at a dangling node");
        let mut path = vec![u, graph.nth_neighbor(u, rng.uniform_index(d))];
        let mut cur = path[1];
        while !rng.chance(self.alpha) {
            let dc = graph.out_degree(cur);
            let next = if dc == 0 {
                cur
            } else {
                graph.nth_neighbor(cur, rng.uniform_index(dc))
            };
            path.push(next);
            cur = next;
        }
        self.install_walk(graph, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ChaChaSource;

    pub(super) fn fig1_initial() -> DynGraph {
        let mut g = DynGraph::new(4);
        for (u, v) in [(0, 1), (1, 3), (2, 0), (2, 1), (3, 2)] {
            g.insert_edge(NodeId(u), NodeId(v)).unwrap();
        }
        g
    }

    pub(super) fn random_graph(n: usize, edges: usize, seed: u64) -> DynGraph {
        let mut rng = ChaChaSource::seed_from(seed);
        let mut g = DynGraph::new(n);
        while g.edge_count() < edges {
            let u = NodeId(rng.uniform_index(n) as u32);
            let v = NodeId(rng.uniform_index(n) as u32);
            let _ = g.insert_edge(u, v);
        }
        g
    }

    #[test]
    fn build_satisfies_adequateness_and_audit() {
        let g = random_graph(60, 300, 9);
        let mut rng = ChaChaSource::seed_from(10);
        let idx = WalkIndex::build(&g, 0.2, 5.0, &mut rng);
        for u in g.nodes() {
            assert_eq!(idx.walks_from(u).len(), idx.target_walks(g.out_degree(u)));
        }
        assert!(idx.audit(&g).is_empty());
    }

    #[test]
    fn all_dangling_graph_builds_empty_index() {
        let g = DynGraph::new(5);
        let mut rng = ChaChaSource::seed_from(1);
        let idx = WalkIndex::build(&g, 0.2, 5.0, &mut rng);
        assert_eq!(idx.walk_count(), 0);
        assert!(idx.audit(&g).is_empty());
    }

    #[test]
    fn ceiling_walk_counts() {
        // d = 3 at budget 5 -> exactly 15 walks.
        let mut g = DynGraph::new(4);
        for v in [1, 2, 3] {
            g.insert_edge(NodeId(0), NodeId(v)).unwrap();
        }
        let mut rng = ChaChaSource::seed_from(2);
        let idx = WalkIndex::build(&g, 0.2, 5.0, &mut rng);
        assert_eq!(idx.walks_from(NodeId(0)).len(), 15);
    }

    #[test]
    fn cross_counter_fault_is_isolated() {
        let g = fig1_initial();
        let mut rng = ChaChaSource::seed_from(3);
        let mut idx = WalkIndex::build(&g, 0.2, 1.5, &mut rng);
        assert!(idx.audit(&g).is_empty());
        idx.stores[2].cross_count += 1;
        let violations = idx.audit(&g);
        assert_eq!(violations.len(), 1, "{violations:?}");
        assert!(violations[0].contains("cross count"), "{violations:?}");
        assert!(violations[0].contains("node 2"), "{violations:?}");
    }

    #[test]
    fn crossing_counts_match_occupancy_law() {
        // A stored walk from s crosses u in expectation
        // sum_i (1-alpha)^i T^i(s,u) = pi(s,u)/alpha (walks are conditioned
        // on taking their first hop), so the mean crossing counter obeys
        // E[s(u)] = sum_s ceil(d(s)·budget) · pi(s,u)/alpha.
        use crate::oracle::power_iteration;
        let alpha = 0.2;
        let budget = 5.0;
        let g = random_graph(100, 400, 17);
        let rounds = 1_000usize;
        let n = g.node_count();
        let mut sums = vec![0.0f64; n];
        let mut sq = vec![0.0f64; n];
        for seed in 0..rounds {
            let mut rng = ChaChaSource::seed_from(9_000 + seed as u64);
            let idx = WalkIndex::build(&g, alpha, budget, &mut rng);
            for u in g.nodes() {
                let c = idx.cross_count(u) as f64;
                sums[u.index()] += c;
                sq[u.index()] += c * c;
            }
        }
        let mut expected = vec![0.0f64; n];
        for s in g.nodes() {
            let want = ((g.out_degree(s) as f64) * budget).ceil();
            if want == 0.0 {
                continue;
            }
            let pi = power_iteration(&g, s, alpha, 160);
            for u in g.nodes() {
                expected[u.index()] += want * pi.get(u) / alpha;
            }
        }
        for u in g.nodes() {
            let mean = sums[u.index()] / rounds as f64;
            let var = (sq[u.index()] / rounds as f64 - mean * mean).max(0.0);
            let se = (var / rounds as f64).sqrt();
            assert!(
                (mean - expected[u.index()]).abs() <= 3.0 * se + 1e-9,
                "node {u}: mean crossings {mean:.3} vs expected {:.3} (se {se:.4})",
                expected[u.index()]
            );
        }
    }

    #[test]
    fn walks_reaching_dangling_nodes_park_there() {
        // 0 -> 1, 1 dangling: every walk from 0 ends at 1, long walks pile
        // up dangling records.
        let mut g = DynGraph::new(2);
        g.insert_edge(NodeId(0), NodeId(1)).unwrap();
        let mut rng = ChaChaSource::seed_from(4);
        let idx = WalkIndex::build(&g, 0.2, 5.0, &mut rng);
        assert_eq!(idx.walks_from(NodeId(0)).len(), 5);
        for (_, w) in idx.iter_walks() {
            assert_eq!(w.terminal(), NodeId(1));
        }
        let long_hops: usize = idx.iter_walks().map(|(_, w)| w.hops() - 1).sum();
        assert_eq!(idx.dangling_records(NodeId(1)).len(), long_hops);
        assert!(idx.audit(&g).is_empty());
    }
}
