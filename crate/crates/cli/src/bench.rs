//! `tad bench` — time engines on a deterministic random query set.
//!
//! Sources and targets are drawn uniformly over transfer-graph vertices and
//! departures uniformly over [00:00, 24:00), all from one seed, so two runs
//! with the same seed time exactly the same queries. Every engine answers
//! the same set; arrivals are compared against the plain transfer-aware
//! engine and reported in the `mismatches` column. Timing is per query on
//! the monotonic clock with warmup excluded, reported as integer
//! microseconds.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tad_core::engines::{CsaEngine, MrEngine, QueryRequest, TadEngine, TdEngine};
use tad_core::preprocess::{CoreChData, FilteredBoards, StopBuckets};
use tad_core::{Network, Time};

use crate::common::{
    load_network, load_or_build_buckets, load_or_build_core, network_is_buffered, EngineKind,
    ModeKind,
};

#[derive(Args)]
pub struct BenchArgs {
    /// Binary network file
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value_t = 1000)]
    queries: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Engines to time, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "tad")]
    engines: Vec<EngineKind>,
    /// Transfer modes to time, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "plain")]
    modes: Vec<ModeKind>,
    /// Untimed queries run before the timed sweep
    #[arg(long, default_value_t = 10)]
    warmup: u32,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit nonzero if any engine mismatches the reference
    #[arg(long)]
    strict: bool,
    /// Shard the query set over this many threads (timings get noisier)
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Reuse a stored core hierarchy
    #[arg(long)]
    core_ch: Option<PathBuf>,
    /// Reuse stored bucket data
    #[arg(long)]
    buckets: Option<PathBuf>,
    #[arg(long, default_value_t = tad_core::preprocess::DEFAULT_CORE_DEGREE)]
    core_degree: f64,
    /// Time the td engine even though this network has boarding buffers
    #[arg(long)]
    allow_unsound: bool,
}

/// One engine instance answering queries; built per combination (and per
/// shard when running parallel).
enum Runner<'a> {
    Tad(TadEngine<'a>),
    Td(TdEngine<'a>),
    Csa(CsaEngine<'a>),
    Mr(MrEngine<'a>),
}

impl<'a> Runner<'a> {
    fn build(
        engine: EngineKind,
        mode: ModeKind,
        net: &'a Network,
        core: Option<&'a CoreChData>,
        buckets: Option<&'a StopBuckets>,
        filtered: Option<&'a FilteredBoards>,
    ) -> Result<Runner<'a>> {
        Ok(match engine {
            EngineKind::Tad => Runner::Tad(match mode {
                ModeKind::Plain => TadEngine::new(net),
                ModeKind::CoreCh => TadEngine::with_core_ch(net, core.unwrap())?,
                ModeKind::BucketCh => TadEngine::with_buckets(net, buckets.unwrap())?,
            }),
            EngineKind::Td => {
                let fb = filtered.unwrap();
                Runner::Td(match mode {
                    ModeKind::Plain => TdEngine::new(net, fb)?,
                    ModeKind::CoreCh => TdEngine::with_core_ch(net, fb, core.unwrap())?,
                    ModeKind::BucketCh => TdEngine::with_buckets(net, fb, buckets.unwrap())?,
                })
            }
            EngineKind::Csa => Runner::Csa(CsaEngine::new(net)?),
            EngineKind::Mr => Runner::Mr(MrEngine::new(net, core.unwrap())?),
        })
    }

    fn answer(&mut self, req: &QueryRequest) -> Result<Time> {
        let result = match self {
            Runner::Tad(e) => e.query(req),
            Runner::Td(e) => e.query(req),
            Runner::Csa(e) => e.query(req),
            Runner::Mr(e) => e.query(req),
        };
        Ok(result?.arrival)
    }
}

/// Combinations that can run at all; invalid ones are skipped with a
/// warning so a sweep over several engines still completes.
fn combo_obstacle(
    engine: EngineKind,
    mode: ModeKind,
    net: &Network,
    allow_unsound: bool,
) -> Option<String> {
    match engine {
        EngineKind::Mr if mode != ModeKind::CoreCh => {
            Some("mr only runs on the core hierarchy".into())
        }
        EngineKind::Csa if mode != ModeKind::Plain => {
            Some("csa has no hierarchy modes".into())
        }
        EngineKind::Csa if !net.stop_footpaths_closed => {
            Some("csa needs a network with closed stop footpaths".into())
        }
        EngineKind::Td if network_is_buffered(net) && !allow_unsound => {
            Some("td is unsound on buffered networks (pass --allow-unsound to time it anyway)".into())
        }
        _ => None,
    }
}

pub fn run(args: BenchArgs) -> Result<ExitCode> {
    if args.queries == 0 {
        bail!("--queries must be positive");
    }
    if args.parallel == 0 {
        bail!("--parallel must be positive");
    }
    let net = load_network(&args.network)?;

    let combos: Vec<(EngineKind, ModeKind)> = args
        .engines
        .iter()
        .flat_map(|&e| args.modes.iter().map(move |&m| (e, m)))
        .collect();
    if combos.is_empty() {
        bail!("no engine/mode combinations requested");
    }

    let need_core = combos
        .iter()
        .any(|&(e, m)| e == EngineKind::Mr || m == ModeKind::CoreCh);
    let need_buckets = combos.iter().any(|&(_, m)| m == ModeKind::BucketCh);
    let need_filtered = combos.iter().any(|&(e, _)| e == EngineKind::Td);
    let core = if need_core {
        Some(load_or_build_core(&net, args.core_ch.as_deref(), args.core_degree)?)
    } else {
        None
    };
    let buckets = if need_buckets {
        Some(load_or_build_buckets(&net, args.buckets.as_deref())?)
    } else {
        None
    };
    let filtered = need_filtered.then(|| FilteredBoards::build(&net));

    // The deterministic query set and the reference arrivals.
    let n = net.graph.vertex_count() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let queries: Vec<QueryRequest> = (0..args.queries)
        .map(|_| {
            QueryRequest::one_to_one(
                rng.random_range(0..n),
                rng.random_range(0..n),
                Time::from_seconds(rng.random_range(0..86_400)),
            )
        })
        .collect();
    let mut reference_engine = TadEngine::new(&net);
    let reference: Vec<Time> = queries
        .iter()
        .map(|q| Ok(reference_engine.query(q)?.arrival))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut total_mismatches = 0u64;
    for (engine, mode) in combos {
        if let Some(reason) = combo_obstacle(engine, mode, &net, args.allow_unsound) {
            eprintln!("skipping {}/{}: {}", engine.name(), mode.name(), reason);
            continue;
        }
        let (durations, arrivals) = time_combo(
            engine,
            mode,
            &net,
            core.as_ref(),
            buckets.as_ref(),
            filtered.as_ref(),
            &queries,
            args.warmup,
            args.parallel,
        )?;
        let mismatches = arrivals.iter().zip(&reference).filter(|(a, r)| a != r).count() as u64;
        total_mismatches += mismatches;

        let mut micros: Vec<u128> = durations.iter().map(|d| d.as_micros()).collect();
        micros.sort_unstable();
        let mean = micros.iter().sum::<u128>() / micros.len() as u128;
        let median = micros[(micros.len() - 1) / 2];
        let p95 = micros[(micros.len() * 95).div_ceil(100).max(1) - 1];
        rows.push(format!("{},{},{mean},{median},{p95},{mismatches}", engine.name(), mode.name()));
    }

    let mut csv = String::from("engine,mode,mean_us,median_us,p95_us,mismatches\n");
    for row in &rows {
        csv.push_str(row);
        csv.push('\n');
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
        }
    }

    if args.strict && total_mismatches > 0 {
        eprintln!("{total_mismatches} mismatches against the reference engine (strict mode)");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

/// Times one engine/mode over the query set, returning per-query durations
/// and arrivals in query order.
#[allow(clippy::too_many_arguments)]
fn time_combo(
    engine: EngineKind,
    mode: ModeKind,
    net: &Network,
    core: Option<&CoreChData>,
    buckets: Option<&StopBuckets>,
    filtered: Option<&FilteredBoards>,
    queries: &[QueryRequest],
    warmup: u32,
    parallel: usize,
) -> Result<(Vec<Duration>, Vec<Time>)> {
    let shard_len = queries.len().div_ceil(parallel);
    let shards: Vec<&[QueryRequest]> = queries.chunks(shard_len).collect();
    let results: Vec<Result<Vec<(Duration, Time)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = shards
            .iter()
            .map(|shard| {
                scope.spawn(move || -> Result<Vec<(Duration, Time)>> {
                    let mut runner = Runner::build(engine, mode, net, core, buckets, filtered)?;
                    for req in shard.iter().cycle().take(warmup as usize) {
                        runner.answer(req)?;
                    }
                    shard
                        .iter()
                        .map(|req| {
                            let start = Instant::now();
                            let arrival = runner.answer(req)?;
                            Ok((start.elapsed(), arrival))
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench shard panicked")).collect()
    });

    let mut durations = Vec::with_capacity(queries.len());
    let mut arrivals = Vec::with_capacity(queries.len());
    for shard in results {
        for (d, a) in shard? {
            durations.push(d);
            arrivals.push(a);
        }
    }
    Ok((durations, arrivals))
}
