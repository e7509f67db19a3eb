//! `tad query` — answer one earliest-arrival question.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::Args;

use tad_core::engines::{CsaEngine, MrEngine, QueryRequest, QueryResult, TadEngine, TdEngine};
use tad_core::preprocess::FilteredBoards;
use tad_core::Time;

use crate::common::{
    display_arrival, load_network, load_or_build_buckets, load_or_build_core, network_is_buffered,
    parse_place, unsound_td_error, EngineKind, ModeKind,
};

#[derive(Args)]
pub struct QueryArgs {
    /// Binary network file
    #[arg(long)]
    network: PathBuf,
    /// Source: vertex number or stop id
    #[arg(long)]
    from: String,
    /// Target: vertex number or stop id
    #[arg(long)]
    to: String,
    /// Departure clock time, HH:MM:SS (hours may exceed 24)
    #[arg(long)]
    at: String,

    #[arg(long, value_enum, default_value_t = EngineKind::Tad)]
    engine: EngineKind,
    /// Transfer relaxation mode; defaults to plain (core-ch for mr)
    #[arg(long, value_enum)]
    mode: Option<ModeKind>,
    /// Reuse a stored core hierarchy instead of building one
    #[arg(long)]
    core_ch: Option<PathBuf>,
    /// Reuse stored bucket data instead of building it
    #[arg(long)]
    buckets: Option<PathBuf>,
    #[arg(long, default_value_t = tad_core::preprocess::DEFAULT_CORE_DEGREE)]
    core_degree: f64,
    /// Disable trip pruning (diagnostic; results are identical)
    #[arg(long)]
    no_pruning: bool,
    /// Run the td engine even though this network has boarding buffers
    #[arg(long)]
    allow_unsound: bool,
}

pub fn run(args: QueryArgs) -> Result<ExitCode> {
    let net = load_network(&args.network)?;
    let source = parse_place(&net, &args.from)?;
    let target = parse_place(&net, &args.to)?;
    let departure: Time = args.at.parse()?;
    let req = QueryRequest {
        source,
        target: Some(target),
        departure,
        pruning: !args.no_pruning,
    };

    let mode = args.mode.unwrap_or(match args.engine {
        EngineKind::Mr => ModeKind::CoreCh,
        _ => ModeKind::Plain,
    });
    match (args.engine, mode) {
        (EngineKind::Mr, m) if m != ModeKind::CoreCh => {
            bail!("mr always relaxes transfers on the core hierarchy; --mode {} is not available", m.name())
        }
        (EngineKind::Csa, m) if m != ModeKind::Plain => {
            bail!("csa relies on closed stop footpaths instead of hierarchy modes; --mode {} is not available", m.name())
        }
        _ => {}
    }
    if args.engine == EngineKind::Td && network_is_buffered(&net) && !args.allow_unsound {
        return Err(unsound_td_error());
    }

    // Preprocessing artifacts load (or build) before the timed query.
    let core = match (args.engine, mode) {
        (EngineKind::Mr, _) | (_, ModeKind::CoreCh) => {
            Some(load_or_build_core(&net, args.core_ch.as_deref(), args.core_degree)?)
        }
        _ => None,
    };
    let buckets = match mode {
        ModeKind::BucketCh => Some(load_or_build_buckets(&net, args.buckets.as_deref())?),
        _ => None,
    };
    let filtered = match args.engine {
        EngineKind::Td => Some(FilteredBoards::build(&net)),
        _ => None,
    };

    let started = Instant::now();
    let result: QueryResult = match args.engine {
        EngineKind::Tad => {
            let mut engine = match mode {
                ModeKind::Plain => TadEngine::new(&net),
                ModeKind::CoreCh => TadEngine::with_core_ch(&net, core.as_ref().unwrap())?,
                ModeKind::BucketCh => TadEngine::with_buckets(&net, buckets.as_ref().unwrap())?,
            };
            engine.query(&req)?
        }
        EngineKind::Td => {
            let fb = filtered.as_ref().unwrap();
            let mut engine = match mode {
                ModeKind::Plain => TdEngine::new(&net, fb)?,
                ModeKind::CoreCh => TdEngine::with_core_ch(&net, fb, core.as_ref().unwrap())?,
                ModeKind::BucketCh => TdEngine::with_buckets(&net, fb, buckets.as_ref().unwrap())?,
            };
            engine.query(&req)?
        }
        EngineKind::Csa => CsaEngine::new(&net)?.query(&req)?,
        EngineKind::Mr => MrEngine::new(&net, core.as_ref().unwrap())?.query(&req)?,
    };
    let elapsed = started.elapsed();

    println!("{}", display_arrival(result.arrival));
    println!(
        "engine={} mode={} settled={} scanned_trips={} relaxed_edges={} time_us={}",
        args.engine.name(),
        mode.name(),
        result.stats.settled,
        result.stats.scanned_trips,
        result.stats.relaxed_edges,
        elapsed.as_micros()
    );
    Ok(ExitCode::SUCCESS)
}
