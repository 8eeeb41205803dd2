//! Benchmark harness for the dynamic PPR engine: dataset ingestion, index
//! construction, workload generation and replay, accuracy evaluation against
//! the dense oracle, and index snapshots.
//!
//! Exit code is 0 only when the run finishes without errors and every final
//! audit is clean.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use firm::oracle::{self, fora_index_free, power_iteration};
use firm::{
    gen_workload, query_sspr, query_topk, ApproxParams, ChaChaSource, DynGraph, EdgeList,
    GraphPool, NodeId, RandomSource, UpdateStats, WalkIndex, WorkloadEvent, WorkloadSpec,
};

#[derive(Parser)]
#[command(name = "firm", version, about = "Dynamic personalized PageRank engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a workload file of updates and queries.
    GenWorkload(GenWorkloadArgs),
    /// Replay a workload against an engine and emit per-event metrics.
    Run(RunArgs),
    /// Apply updates, then measure per-source relative error vs the oracle.
    Accuracy(AccuracyArgs),
    /// Build an index (optionally replaying a workload) and audit it.
    Audit(AuditArgs),
    /// Build an index and write a binary snapshot of its walks.
    Snapshot(SnapshotArgs),
    /// Load a snapshot, rebuild auxiliary structures, and audit it.
    Restore(RestoreArgs),
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Edge-list file: whitespace-separated "u v" lines, '#' comments.
    #[arg(long)]
    dataset: PathBuf,
    /// Treat the input as directed (otherwise both directions are added).
    #[arg(long)]
    directed: bool,
    /// Fraction of edges forming the initial graph; the rest are reserved
    /// for insertions.
    #[arg(long, default_value_t = 0.9)]
    split: f64,
    /// Seed for the shuffle/split, workload, and index sampling streams.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Effective threshold; defaults to 1/n once the graph is loaded.
    #[arg(long)]
    delta: Option<f64>,
    /// Failure probability; defaults to 1/n once the graph is loaded.
    #[arg(long)]
    p_f: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl ParamArgs {
    fn resolve(&self, n: usize) -> Result<ApproxParams> {
        let inv_n = 1.0 / n.max(2) as f64;
        ApproxParams::new(
            self.alpha,
            self.epsilon,
            self.delta.unwrap_or(inv_n),
            self.p_f.unwrap_or(inv_n),
            self.beta,
        )
        .map_err(|e| anyhow!(e))
    }
}

#[derive(Args, Clone)]
struct WorkloadArgs {
    /// Percentage of events that are updates.
    #[arg(long, default_value_t = 50)]
    update_pct: u32,
    /// Number of events.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Probability that an update is an insertion.
    #[arg(long, default_value_t = 0.5)]
    insert_prob: f64,
    /// Query kind for generated workloads.
    #[arg(long, value_enum, default_value_t = QueryKind::Full)]
    query_kind: QueryKind,
    /// k for top-k queries.
    #[arg(long, default_value_t = 500)]
    k: usize,
}

impl WorkloadArgs {
    fn spec(&self) -> WorkloadSpec {
        let mut spec =
            WorkloadSpec::new(self.update_pct, self.count).with_insert_prob(self.insert_prob);
        if matches!(self.query_kind, QueryKind::Topk) {
            spec = spec.with_topk(self.k);
        }
        spec
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum QueryKind {
    Full,
    Topk,
}

#[derive(Copy, Clone, ValueEnum)]
enum Engine {
    /// Incrementally maintained walk index.
    Firm,
    /// Rebuild the whole index after every update.
    Rebuild,
    /// No index; fresh walks at query time.
    Indexfree,
}

#[derive(Args)]
struct GenWorkloadArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Output workload file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Replay this workload file instead of generating one.
    #[arg(long)]
    workload_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Engine::Firm)]
    engine: Engine,
    /// Per-event metrics CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AccuracyArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Number of updates applied before measuring.
    #[arg(long, default_value_t = 500)]
    updates: usize,
    /// Probability that an update is an insertion.
    #[arg(long, default_value_t = 0.5)]
    insert_prob: f64,
    /// Number of query sources sampled.
    #[arg(long, default_value_t = 50)]
    sources: usize,
    #[arg(long, value_enum, default_value_t = Engine::Firm)]
    engine: Engine,
    /// Per-source accuracy CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Replay this workload's updates before auditing.
    #[arg(long)]
    workload_file: Option<PathBuf>,
}

#[derive(Args)]
struct SnapshotArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Snapshot output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RestoreArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Snapshot to load.
    #[arg(long)]
    index: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenWorkload(args) => cmd_gen_workload(args),
        Command::Run(args) => cmd_run(args),
        Command::Accuracy(args) => cmd_accuracy(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Snapshot(args) => cmd_snapshot(args),
        Command::Restore(args) => cmd_restore(args),
    }
}

/// Load, shuffle, and split the dataset; stream 0 of the seed drives the
/// shuffle so every subcommand sees the same initial graph.
fn load_pool(args: &DatasetArgs) -> Result<GraphPool> {
    let list = EdgeList::load(&args.dataset, args.directed)
        .with_context(|| format!("loading {}", args.dataset.display()))?;
    if !(0.0..=1.0).contains(&args.split) {
        bail!("--split must be in [0, 1]");
    }
    let mut rng = ChaChaSource::seed_from(args.seed).split(0);
    Ok(list.split(args.split, &mut rng))
}

fn cmd_gen_workload(args: GenWorkloadArgs) -> Result<()> {
    let pool = load_pool(&args.dataset)?;
    let mut rng = ChaChaSource::seed_from(args.dataset.seed).split(1);
    let events = gen_workload(&pool, &args.workload.spec(), &mut rng)?;
    firm::workload::write_workload_file(&args.out, &events)?;
    println!(
        "wrote {} events ({} updates) to {}",
        events.len(),
        events.iter().filter(|e| e.is_update()).count(),
        args.out.display()
    );
    Ok(())
}

struct EventRow {
    kind: &'static str,
    latency_ns: u128,
    touched_walks: Option<usize>,
    walks_consumed: Option<usize>,
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let pool = load_pool(&args.dataset)?;
    let n = pool.graph.node_count();
    let params = args.params.resolve(n)?;
    let events = match &args.workload_file {
        Some(path) => firm::workload::read_workload_file(path)?,
        None => {
            let mut rng = ChaChaSource::seed_from(args.dataset.seed).split(1);
            gen_workload(&pool, &args.workload.spec(), &mut rng)?
        }
    };

    let mut graph = pool.graph;
    let mut build_rng = ChaChaSource::seed_from(args.dataset.seed).split(2);
    let mut engine_rng = ChaChaSource::seed_from(args.dataset.seed).split(3);
    let build_start = Instant::now();
    let mut index = match args.engine {
        Engine::Indexfree => None,
        _ => Some(WalkIndex::build(
            &graph,
            params.alpha,
            params.walk_budget(),
            &mut build_rng,
        )),
    };
    let build_time = build_start.elapsed();

    let mut rows: Vec<EventRow> = Vec::with_capacity(events.len());
    for ev in &events {
        let t0 = Instant::now();
        let mut touched = None;
        let mut consumed = None;
        match *ev {
            WorkloadEvent::Insert { u, v } | WorkloadEvent::Delete { u, v } => {
                let insert = matches!(ev, WorkloadEvent::Insert { .. });
                match args.engine {
                    Engine::Firm => {
                        apply_update(&mut graph, u, v, insert)?;
                        let idx = index.as_mut().unwrap();
                        let stats: UpdateStats = if insert {
                            idx.update_insert(&graph, u, v, &mut engine_rng)
                        } else {
                            idx.update_delete(&graph, u, v, &mut engine_rng)
                        };
                        touched = Some(stats.touched());
                    }
                    Engine::Rebuild => {
                        apply_update(&mut graph, u, v, insert)?;
                        let rebuilt = WalkIndex::build(
                            &graph,
                            params.alpha,
                            params.walk_budget(),
                            &mut engine_rng,
                        );
                        touched = Some(rebuilt.walk_count());
                        index = Some(rebuilt);
                    }
                    Engine::Indexfree => {
                        apply_update(&mut graph, u, v, insert)?;
                        touched = Some(0);
                    }
                }
            }
            WorkloadEvent::QueryFull { s } => {
                consumed = Some(match (&args.engine, &index) {
                    (Engine::Indexfree, _) => {
                        fora_index_free(&graph, s, &params, &mut engine_rng).walks_consumed
                    }
                    (_, Some(idx)) => query_sspr(&graph, idx, s, &params)?.walks_consumed,
                    _ => unreachable!("indexed engines always hold an index"),
                });
            }
            WorkloadEvent::QueryTopK { s, k } => {
                let k = k.min(graph.node_count());
                consumed = Some(match (&args.engine, &index) {
                    (Engine::Indexfree, _) => {
                        // index-free top-k: full estimate, then rank
                        fora_index_free(&graph, s, &params, &mut engine_rng).walks_consumed
                    }
                    (_, Some(idx)) => query_topk(&graph, idx, s, k, &params)?.walks_consumed(),
                    _ => unreachable!("indexed engines always hold an index"),
                });
            }
        }
        rows.push(EventRow {
            kind: ev.kind(),
            latency_ns: t0.elapsed().as_nanos(),
            touched_walks: touched,
            walks_consumed: consumed,
        });
    }

    // audit everything the engine maintains before reporting
    let mut violations = graph.audit();
    if let Some(idx) = &index {
        violations.extend(idx.audit(&graph));
    }

    if let Some(path) = &args.out {
        let mut csv = String::from("event,kind,latency_ns,touched_walks,walks_consumed\n");
        for (i, row) in rows.iter().enumerate() {
            let touched = row.touched_walks.map_or(String::new(), |t| t.to_string());
            let consumed = row.walks_consumed.map_or(String::new(), |c| c.to_string());
            writeln!(
                csv,
                "{i},{},{},{touched},{consumed}",
                row.kind, row.latency_ns
            )?;
        }
        std::fs::write(path, csv)?;
    }

    let updates: Vec<&EventRow> = rows.iter().filter(|r| r.touched_walks.is_some()).collect();
    let queries: Vec<&EventRow> = rows.iter().filter(|r| r.walks_consumed.is_some()).collect();
    let mean = |xs: &[&EventRow], f: &dyn Fn(&EventRow) -> f64| -> f64 {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().map(|r| f(r)).sum::<f64>() / xs.len() as f64
        }
    };
    println!("engine: {}", engine_name(args.engine));
    println!("index build: {:.3}s", build_time.as_secs_f64());
    println!(
        "events: {} ({} updates, {} queries)",
        rows.len(),
        updates.len(),
        queries.len()
    );
    println!(
        "mean update latency: {:.3}us; mean touched walks: {:.2}",
        mean(&updates, &|r| r.latency_ns as f64) / 1_000.0,
        mean(&updates, &|r| r.touched_walks.unwrap() as f64),
    );
    println!(
        "mean query latency: {:.3}us; mean walks consumed: {:.1}",
        mean(&queries, &|r| r.latency_ns as f64) / 1_000.0,
        mean(&queries, &|r| r.walks_consumed.unwrap() as f64),
    );
    report_violations(&violations)
}

fn apply_update(graph: &mut DynGraph, u: NodeId, v: NodeId, insert: bool) -> Result<()> {
    if insert {
        graph.insert_edge(u, v)?;
    } else {
        graph.delete_edge(u, v)?;
    }
    Ok(())
}

fn cmd_accuracy(args: AccuracyArgs) -> Result<()> {
    let pool = load_pool(&args.dataset)?;
    let n: usize = pool.graph.node_count();
    oracle::check_oracle_size(n)?;
    let params = args.params.resolve(n)?;

    let mut graph = pool.graph.clone();
    let mut build_rng = ChaChaSource::seed_from(args.dataset.seed).split(2);
    let mut engine_rng = ChaChaSource::seed_from(args.dataset.seed).split(3);
    let mut index = match args.engine {
        Engine::Indexfree => None,
        _ => Some(WalkIndex::build(
            &graph,
            params.alpha,
            params.walk_budget(),
            &mut build_rng,
        )),
    };

    // update phase: insertions from the reserve, deletions from the graph
    let mut wl_rng = ChaChaSource::seed_from(args.dataset.seed).split(1);
    let spec = WorkloadSpec::new(100, args.updates).with_insert_prob(args.insert_prob);
    let events = gen_workload(&pool, &spec, &mut wl_rng)?;
    for ev in &events {
        let (u, v, insert) = match *ev {
            WorkloadEvent::Insert { u, v } => (u, v, true),
            WorkloadEvent::Delete { u, v } => (u, v, false),
            _ => unreachable!("pure update workload"),
        };
        apply_update(&mut graph, u, v, insert)?;
        if let (Engine::Firm, Some(idx)) = (args.engine, index.as_mut()) {
            if insert {
                idx.update_insert(&graph, u, v, &mut engine_rng);
            } else {
                idx.update_delete(&graph, u, v, &mut engine_rng);
            }
        }
    }
    if matches!(args.engine, Engine::Rebuild) {
        // rebuild once after all updates; per-update rebuilds are identical
        index = Some(WalkIndex::build(
            &graph,
            params.alpha,
            params.walk_budget(),
            &mut engine_rng,
        ));
    }

    let mut src_rng = ChaChaSource::seed_from(args.dataset.seed).split(4);
    let mut csv = String::from("source,avg_rel_err,max_rel_err\n");
    let mut worst: f64 = 0.0;
    for _ in 0..args.sources {
        let s = NodeId(src_rng.uniform_index(n) as u32);
        let exact = power_iteration(&graph, s, params.alpha, 160);
        let est = match (&args.engine, &index) {
            (Engine::Indexfree, _) => fora_index_free(&graph, s, &params, &mut engine_rng),
            (_, Some(idx)) => query_sspr(&graph, idx, s, &params)?,
            _ => unreachable!(),
        };
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        let mut considered = 0usize;
        for t in graph.nodes() {
            let pi = exact.get(t);
            if pi >= params.delta {
                let rel = (est.get(t) - pi).abs() / pi;
                sum += rel;
                max = max.max(rel);
                considered += 1;
            }
        }
        let avg = if considered == 0 {
            0.0
        } else {
            sum / considered as f64
        };
        worst = worst.max(max);
        writeln!(csv, "{s},{avg:.6},{max:.6}")?;
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    println!(
        "accuracy over {} sources after {} updates (engine {}): worst max_rel_err {:.4}",
        args.sources,
        args.updates,
        engine_name(args.engine),
        worst
    );
    if let Some(idx) = &index {
        report_violations(&idx.audit(&graph))?;
    }
    Ok(())
}

fn cmd_audit(args: AuditArgs) -> Result<()> {
    let pool = load_pool(&args.dataset)?;
    let params = args.params.resolve(pool.graph.node_count())?;
    let mut graph = pool.graph.clone();
    let mut rng = ChaChaSource::seed_from(args.dataset.seed).split(2);
    let mut index = WalkIndex::build(&graph, params.alpha, params.walk_budget(), &mut rng);
    let mut updates = 0usize;
    if let Some(path) = &args.workload_file {
        let mut engine_rng = ChaChaSource::seed_from(args.dataset.seed).split(3);
        for ev in firm::workload::read_workload_file(path)? {
            match ev {
                WorkloadEvent::Insert { u, v } => {
                    graph.insert_edge(u, v)?;
                    index.update_insert(&graph, u, v, &mut engine_rng);
                    updates += 1;
                }
                WorkloadEvent::Delete { u, v } => {
                    graph.delete_edge(u, v)?;
                    index.update_delete(&graph, u, v, &mut engine_rng);
                    updates += 1;
                }
                _ => {}
            }
        }
    }
    println!(
        "n={}, m={}, walks={}, updates replayed={updates}",
        graph.node_count(),
        graph.edge_count(),
        index.walk_count()
    );
    let mut violations = graph.audit();
    violations.extend(index.audit(&graph));
    report_violations(&violations)
}

fn cmd_snapshot(args: SnapshotArgs) -> Result<()> {
    let pool = load_pool(&args.dataset)?;
    let params = args.params.resolve(pool.graph.node_count())?;
    let mut rng = ChaChaSource::seed_from(args.dataset.seed).split(2);
    let index = WalkIndex::build(&pool.graph, params.alpha, params.walk_budget(), &mut rng);
    let file = std::fs::File::create(&args.out)?;
    index.save_snapshot_for(&pool.graph, std::io::BufWriter::new(file))?;
    println!(
        "wrote snapshot of {} walks to {}",
        index.walk_count(),
        args.out.display()
    );
    Ok(())
}

fn cmd_restore(args: RestoreArgs) -> Result<()> {
    let pool = load_pool(&args.dataset)?;
    let file = std::fs::File::open(&args.index)
        .with_context(|| format!("opening {}", args.index.display()))?;
    let index = WalkIndex::load_snapshot(std::io::BufReader::new(file), &pool.graph)?;
    println!(
        "restored {} walks; auxiliary structures rebuilt",
        index.walk_count()
    );
    report_violations(&index.audit(&pool.graph))
}

fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Firm => "firm",
        Engine::Rebuild => "rebuild",
        Engine::Indexfree => "indexfree",
    }
}

fn report_violations(violations: &[String]) -> Result<()> {
    if violations.is_empty() {
        println!("audit: clean");
        Ok(())
    } else {
        for v in violations {
            eprintln!("audit violation: {v}");
        }
        bail!("{} audit violations", violations.len());
    }
}
