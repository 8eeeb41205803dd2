//! Versioned binary snapshot of the walk index.
//!
//! Layout (little-endian): magic `FIRM1`, `n: u64`, `m: u64`, `alpha: f64`,
//! `walk_budget: f64`, `walk_count: u64`, then each walk as a `u32` position
//! count followed by that many `u32` node ids. Only the paths are persisted;
//! records, counters and registries are rebuilt on load, and the walks are
//! re-validated against the graph the caller supplies.

use std::io::{Read, Write};

use super::WalkIndex;
use crate::error::{Error, Result};
use crate::graph::{DynGraph, NodeId};

const MAGIC: &[u8; 5] = b"FIRM1";

impl WalkIndex {
    /// Serialize the index; `graph` supplies the node/edge counts recorded
    /// in the header so a later load can refuse a mismatched graph early.
    pub fn save_snapshot_for(&self, graph: &DynGraph, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(graph.node_count() as u64).to_le_bytes())?;
        w.write_all(&(graph.edge_count() as u64).to_le_bytes())?;
        w.write_all(&self.alpha.to_le_bytes())?;
        w.write_all(&self.walk_budget.to_le_bytes())?;
        w.write_all(&(self.walk_count() as u64).to_le_bytes())?;
        // Deterministic order: by source node, then by id within a source.
        for source_list in &self.by_source {
            let mut ids = source_list.clone();
            ids.sort_unstable();
            for id in ids {
                let path = self.walk(id).path();
                w.write_all(&(path.len() as u32).to_le_bytes())?;
                for v in path {
                    w.write_all(&v.0.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    /// Deserialize a snapshot and rebuild all auxiliary structures against
    /// `graph`, which must match the header and make every stored step valid
    /// (an existing edge, or a self-loop step at a currently dangling node).
    pub fn load_snapshot(mut r: impl Read, graph: &DynGraph) -> Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let n = read_u64(&mut r)? as usize;
        let m = read_u64(&mut r)? as usize;
        if n != graph.node_count() || m != graph.edge_count() {
            return Err(Error::Snapshot(format!(
                "snapshot is for a graph with n={n}, m={m}; got n={}, m={}",
                graph.node_count(),
                graph.edge_count()
            )));
        }
        let alpha = read_f64(&mut r)?;
        let walk_budget = read_f64(&mut r)?;
        if alpha <= 0.0 || alpha >= 1.0 || walk_budget <= 0.0 {
            return Err(Error::Snapshot("parameter fields out of range".into()));
        }
        let walk_count = read_u64(&mut r)? as usize;
        let mut index = Self {
            alpha,
            walk_budget,
            walks: Vec::with_capacity(walk_count),
            free_ids: Vec::new(),
            by_source: vec![Vec::new(); n],
            stores: vec![Default::default(); n],
            live_walks: 0,
        };
        for i in 0..walk_count {
            let len = read_u32(&mut r)? as usize;
            if len < 2 {
                return Err(Error::Snapshot(format!("walk {i} shorter than one hop")));
            }
            let mut path = Vec::with_capacity(len);
            for _ in 0..len {
                let v = read_u32(&mut r)?;
                if v as usize >= n {
                    return Err(Error::Snapshot(format!(
                        "walk {i} references node {v} >= {n}"
                    )));
                }
                path.push(NodeId(v));
            }
            for pair in path.windows(2) {
                let ok = graph.has_edge(pair[0], pair[1])
                    || (pair[0] == pair[1] && graph.is_dangling(pair[0]));
                if !ok {
                    return Err(Error::Snapshot(format!(
                        "walk {i} step ({}, {}) invalid on this graph",
                        pair[0], pair[1]
                    )));
                }
            }
            index.install_walk(graph, path);
        }
        let violations = index.audit(graph);
        if !violations.is_empty() {
            return Err(Error::Snapshot(format!(
                "rebuilt index inconsistent: {}",
                violations.join("; ")
            )));
        }
        Ok(index)
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
