//! Workload generation under the random arrival model, and the event file
//! format.
//!
//! An update is a coin flip between inserting a uniformly random reserved
//! edge and deleting a uniformly random current edge; queries pick a
//! uniformly random source node. Event files carry one event per line:
//! `I u v`, `D u v`, `Q s` or `T s k`.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{GraphPool, NodeId};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadEvent {
    Insert { u: NodeId, v: NodeId },
    Delete { u: NodeId, v: NodeId },
    QueryFull { s: NodeId },
    QueryTopK { s: NodeId, k: usize },
}

impl WorkloadEvent {
    pub fn is_update(&self) -> bool {
        matches!(
            self,
            WorkloadEvent::Insert { .. } | WorkloadEvent::Delete { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WorkloadEvent::Insert { .. } => "insert",
            WorkloadEvent::Delete { .. } => "delete",
            WorkloadEvent::QueryFull { .. } => "query",
            WorkloadEvent::QueryTopK { .. } => "topk",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WorkloadSpec {
    /// Percentage of events that are updates, 0..=100.
    pub update_pct: u32,
    pub count: usize,
    /// Probability an update is an insertion (the rest delete).
    pub insert_prob: f64,
    /// `None`: full queries; `Some(k)`: top-k queries.
    pub topk: Option<usize>,
}

impl WorkloadSpec {
    pub fn new(update_pct: u32, count: usize) -> Self {
        Self {
            update_pct,
            count,
            insert_prob: 0.5,
            topk: None,
        }
    }

    pub fn with_topk(mut self, k: usize) -> Self {
        self.topk = Some(k);
        self
    }

    pub fn with_insert_prob(mut self, p: f64) -> Self {
        self.insert_prob = p;
        self
    }
}

/// Generate `spec.count` events against the pool's current state. The pool
/// is not consumed; generation simulates edge availability on scratch
/// copies, so the caller replays the events against the real structures.
pub fn gen_workload(
    pool: &GraphPool,
    spec: &WorkloadSpec,
    rng: &mut impl RandomSource,
) -> Result<Vec<WorkloadEvent>> {
    assert!(spec.update_pct <= 100, "update percentage is 0..=100");
    let n = pool.graph.node_count();
    assert!(n > 0, "empty node universe");
    let n_updates = ((spec.count as u64 * spec.update_pct as u64 + 50) / 100) as usize;

    // Which positions are updates: exact count, uniformly placed.
    let mut is_update = vec![false; spec.count];
    for slot in is_update.iter_mut().take(n_updates) {
        *slot = true;
    }
    for i in (1..is_update.len()).rev() {
        let j = rng.uniform_index(i + 1);
        is_update.swap(i, j);
    }

    let mut reserved = pool.reserved.clone();
    let mut current: Vec<(NodeId, NodeId)> = pool.graph.edges().collect();
    let mut events = Vec::with_capacity(spec.count);
    for update in is_update {
        if update {
            let insert = rng.chance(spec.insert_prob);
            if insert {
                if reserved.is_empty() {
                    return Err(Error::PoolExhausted);
                }
                let (u, v) = reserved.swap_remove(rng.uniform_index(reserved.len()));
                current.push((u, v));
                events.push(WorkloadEvent::Insert { u, v });
            } else {
                if current.is_empty() {
                    return Err(Error::PoolExhausted);
                }
                let (u, v) = current.swap_remove(rng.uniform_index(current.len()));
                events.push(WorkloadEvent::Delete { u, v });
            }
        } else {
            let s = NodeId(rng.uniform_index(n) as u32);
            events.push(match spec.topk {
                Some(k) => WorkloadEvent::QueryTopK { s, k },
                None => WorkloadEvent::QueryFull { s },
            });
        }
    }
    Ok(events)
}

pub fn write_workload(mut w: impl Write, events: &[WorkloadEvent]) -> Result<()> {
    for ev in events {
        match ev {
            WorkloadEvent::Insert { u, v } => writeln!(w, "I {u} {v}")?,
            WorkloadEvent::Delete { u, v } => writeln!(w, "D {u} {v}")?,
            WorkloadEvent::QueryFull { s } => writeln!(w, "Q {s}")?,
            WorkloadEvent::QueryTopK { s, k } => writeln!(w, "T {s} {k}")?,
        }
    }
    Ok(())
}

pub fn write_workload_file(path: impl AsRef<Path>, events: &[WorkloadEvent]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_workload(&mut file, events)?;
    file.flush()?;
    Ok(())
}

pub fn read_workload(r: impl BufRead) -> Result<Vec<WorkloadEvent>> {
    let mut events = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap();
        let mut num = |what: &str| -> Result<u64> {
            fields
                .next()
                .ok_or_else(|| bad(&format!("missing {what}")))?
                .parse::<u64>()
                .map_err(|_| bad(&format!("invalid {what}")))
        };
        let ev = match tag {
            "I" => WorkloadEvent::Insert {
                u: NodeId(num("u")? as u32),
                v: NodeId(num("v")? as u32),
            },
            "D" => WorkloadEvent::Delete {
                u: NodeId(num("u")? as u32),
                v: NodeId(num("v")? as u32),
            },
            "Q" => WorkloadEvent::QueryFull {
                s: NodeId(num("s")? as u32),
            },
            "T" => WorkloadEvent::QueryTopK {
                s: NodeId(num("s")? as u32),
                k: num("k")? as usize,
            },
            other => return Err(bad(&format!("unknown event tag '{other}'"))),
        };
        events.push(ev);
    }
    Ok(events)
}

pub fn read_workload_file(path: impl AsRef<Path>) -> Result<Vec<WorkloadEvent>> {
    read_workload(std::io::BufReader::new(std::fs::File::open(path)?))
}
