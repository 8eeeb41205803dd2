//! Mutable directed graph with O(1) degree lookup, O(1) edge existence test
//! and O(1) amortized insertion/deletion, plus edge-list ingestion.
//!
//! The node universe is fixed when the graph is created (node ids are dense
//! `0..n`); only edges evolve. Deletion swap-removes inside the adjacency
//! vector and patches the neighbor-to-slot map, so adjacency order carries no
//! meaning.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Dense node identifier, `0 <= id < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct DynGraph {
    out_adj: Vec<Vec<NodeId>>,
    // per node: neighbor -> its slot in out_adj
    out_pos: Vec<HashMap<u32, u32>>,
    m: usize,
}

impl DynGraph {
    /// An edgeless graph over the fixed node universe `0..n`.
    pub fn new(n: usize) -> Self {
        Self {
            out_adj: vec![Vec::new(); n],
            out_pos: vec![HashMap::new(); n],
            m: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_adj[u.index()].len()
    }

    #[inline]
    pub fn is_dangling(&self, u: NodeId) -> bool {
        self.out_adj[u.index()].is_empty()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_pos[u.index()].contains_key(&v.0)
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.out_adj[u.index()]
    }

    /// The `i`-th out-neighbor in (arbitrary but stable-between-mutations)
    /// adjacency order; used for uniform next-hop sampling.
    #[inline]
    pub fn nth_neighbor(&self, u: NodeId, i: usize) -> NodeId {
        self.out_adj[u.index()][i]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.out_adj.len() as u32).map(NodeId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        if self.has_edge(u, v) {
            return Err(Error::DuplicateEdge { u: u.0, v: v.0 });
        }
        let slot = self.out_adj[u.index()].len() as u32;
        self.out_adj[u.index()].push(v);
        self.out_pos[u.index()].insert(v.0, slot);
        self.m += 1;
        Ok(())
    }

    pub fn delete_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        let slot = match self.out_pos[u.index()].remove(&v.0) {
            Some(s) => s as usize,
            None => return Err(Error::MissingEdge { u: u.0, v: v.0 }),
        };
        let adj = &mut self.out_adj[u.index()];
        adj.swap_remove(slot);
        if slot < adj.len() {
            let moved = adj[slot];
            self.out_pos[u.index()].insert(moved.0, slot as u32);
        }
        self.m -= 1;
        Ok(())
    }

    /// Full structural audit: degree/count bookkeeping and the adjacency /
    /// slot-map bijection. Returns human-readable violations; empty is clean.
    pub fn audit(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let mut degree_sum = 0usize;
        for u in self.nodes() {
            let adj = &self.out_adj[u.index()];
            let pos = &self.out_pos[u.index()];
            degree_sum += adj.len();
            if adj.len() != pos.len() {
                violations.push(format!(
                    "node {u}: adjacency length {} != slot map size {}",
                    adj.len(),
                    pos.len()
                ));
            }
            for (slot, &v) in adj.iter().enumerate() {
                if pos.get(&v.0).copied() != Some(slot as u32) {
                    violations.push(format!("node {u}: neighbor {v} not mapped to slot {slot}"));
                }
            }
        }
        if degree_sum != self.m {
            violations.push(format!("degree sum {degree_sum} != edge count {}", self.m));
        }
        violations
    }

    /// Adjacency sets per node, sorted; order-insensitive equality for tests.
    pub fn adjacency_sets(&self) -> Vec<Vec<u32>> {
        self.out_adj
            .iter()
            .map(|adj| {
                let mut s: Vec<u32> = adj.iter().map(|v| v.0).collect();
                s.sort_unstable();
                s
            })
            .collect()
    }
}

/// A parsed edge-list dataset: dense node universe plus every (deduplicated)
/// directed edge, before any of them are applied to a graph.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl EdgeList {
    /// Parse a whitespace-separated "u v" file. Lines starting with `#` and
    /// blank lines are ignored. Node ids are compacted to `0..n` in first
    /// appearance order. With `directed == false` each line contributes both
    /// directions. Duplicate edges collapse; self-loops are kept.
    pub fn load(path: impl AsRef<Path>, directed: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, directed)
    }

    pub fn parse(text: &str, directed: bool) -> Result<Self> {
        let mut remap: HashMap<u64, u32> = HashMap::new();
        let mut seen: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
        let mut edges = Vec::new();
        let intern = |raw: u64, remap: &mut HashMap<u64, u32>| -> NodeId {
            let next = remap.len() as u32;
            NodeId(*remap.entry(raw).or_insert(next))
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let parse_field = |field: Option<&str>, what: &str| -> Result<u64> {
                let field = field.ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    msg: format!("missing {what}"),
                })?;
                field.parse::<u64>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("invalid {what} '{field}'"),
                })
            };
            let raw_u = parse_field(fields.next(), "source id")?;
            let raw_v = parse_field(fields.next(), "target id")?;
            let u = intern(raw_u, &mut remap);
            let v = intern(raw_v, &mut remap);
            if seen.insert((u.0, v.0)) {
                edges.push((u, v));
            }
            if !directed && seen.insert((v.0, u.0)) {
                edges.push((v, u));
            }
        }
        Ok(Self {
            n: remap.len(),
            edges,
        })
    }

    /// Build a graph from every edge.
    pub fn into_graph(self) -> DynGraph {
        let mut g = DynGraph::new(self.n);
        for (u, v) in self.edges {
            g.insert_edge(u, v).expect("edge list is deduplicated");
        }
        g
    }

    /// Shuffle the edges and split them: the first `fraction` become the
    /// initial graph, the remainder the reserved insertion pool. The node
    /// universe covers both parts, so reserved insertions never need an id
    /// remap.
    pub fn split(self, fraction: f64, rng: &mut impl RandomSource) -> GraphPool {
        assert!(
            (0.0..=1.0).contains(&fraction),
            "split fraction must be in [0,1]"
        );
        let mut edges = self.edges;
        // Fisher-Yates
        for i in (1..edges.len()).rev() {
            let j = rng.uniform_index(i + 1);
            edges.swap(i, j);
        }
        let cut = (edges.len() as f64 * fraction).round() as usize;
        let reserved = edges.split_off(cut.min(edges.len()));
        let mut graph = DynGraph::new(self.n);
        for &(u, v) in &edges {
            graph.insert_edge(u, v).expect("edge list is deduplicated");
        }
        GraphPool { graph, reserved }
    }
}

/// The evolving-graph workload substrate: the initial graph plus the edges
/// held back for future insertions.
#[derive(Debug, Clone)]
pub struct GraphPool {
    pub graph: DynGraph,
    pub reserved: Vec<(NodeId, NodeId)>,
}
