//! Approximate single-source personalized PageRank (SSPPR) on evolving
//! directed graphs.
//!
//! The engine combines a local forward-push solver with an index of
//! pre-sampled random walks. The index is maintained *incrementally*: after
//! an edge insertion or deletion only the walks that actually crossed the
//! touched node are adjusted, which takes expected constant time per update
//! under a random arrival model. Queries then run exactly as they would on a
//! static graph.
//!
//! Module map:
//!
//! - [`graph`]: mutable directed graph with O(1) degree/edge lookups,
//!   edge-list ingestion and the 90/10 initial/reserved split.
//! - [`push`]: the forward-push local solver (reserve + residue vectors).
//! - [`index`]: the walk index, its per-edge crossing records, and the
//!   incremental insert/delete maintenance procedures.
//! - [`query`]: SSPPR and top-k estimation on top of push + index.
//! - [`oracle`]: ground-truth power iteration, hop-truncated PPR, an
//!   index-free baseline and a rebuild-from-scratch baseline.
//! - [`workload`]: update/query event streams under the random arrival
//!   model, plus their text file format.
//! - [`rng`]: the random source abstraction (seedable, splittable, and
//!   scriptable for deterministic scenario tests).
//!
//! Concurrency: none of the structures synchronize internally. A graph and
//! its index want exactly one mutator at a time; any number of concurrent
//! readers may run between mutations.

pub mod error;
pub mod graph;
pub mod index;
pub mod oracle;
pub mod params;
pub mod push;
pub mod query;
pub mod rng;
pub mod workload;

pub use error::{Error, Result};
pub use graph::{DynGraph, EdgeList, GraphPool, NodeId};
pub use index::{CrossingRecord, UpdateStats, Walk, WalkId, WalkIndex};
pub use params::ApproxParams;
pub use push::{forward_push, PushParams, PushResult};
pub use query::{query_sspr, query_topk, SsprResult, TopKResult};
pub use rng::{ChaChaSource, RandomSource, ScriptedSource};
pub use workload::{gen_workload, WorkloadEvent, WorkloadSpec};
