//! `tad build` — assemble artifacts and preprocess hierarchies.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;

use tad_core::model::{assemble_network, parse_gtfs, parse_transfer_graph, validate_network, StopMapping};
use tad_core::preprocess::{build_ch, CoreChData, StopBuckets, DEFAULT_CORE_DEGREE};
use tad_core::{storage, walk, Network};

use crate::common::{load_network, save_network};

#[derive(Args)]
pub struct BuildArgs {
    /// Directory with stops.txt, trips.txt, stop_times.txt, transfers.txt
    #[arg(long, requires = "graph")]
    gtfs_dir: Option<PathBuf>,
    /// Walking graph text file (pairs with --gtfs-dir); stop i rides vertex i
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Start from an already-built binary network instead of text inputs
    #[arg(long, conflicts_with = "gtfs_dir")]
    network: Option<PathBuf>,

    /// Where to write the binary network
    #[arg(long)]
    out: PathBuf,
    /// Verify stop-to-stop walking closure and record it in the network
    #[arg(long)]
    closed: bool,

    /// Also build a full contraction hierarchy and write it here
    #[arg(long)]
    ch: Option<PathBuf>,
    /// Also build a core hierarchy (stops kept uncontracted) and write it here
    #[arg(long)]
    core_ch: Option<PathBuf>,
    /// Also build per-stop bucket data and write it here
    #[arg(long)]
    buckets: Option<PathBuf>,
    /// Stop contracting once the core's average degree exceeds this
    #[arg(long, default_value_t = DEFAULT_CORE_DEGREE)]
    core_degree: f64,
}

pub fn run(args: BuildArgs) -> Result<ExitCode> {
    let mut net = match (&args.gtfs_dir, &args.network) {
        (Some(dir), None) => {
            let graph_path = args.graph.as_ref().expect("clap enforces --graph with --gtfs-dir");
            let start = Instant::now();
            let timetable = parse_gtfs(dir)?;
            let graph = parse_transfer_graph(graph_path)?;
            let net = assemble_network(timetable, graph, StopMapping::Identity)?;
            println!("network assembly: {:?}", start.elapsed());
            net
        }
        (None, Some(path)) => load_network(path)?,
        (None, None) => bail!("pass either --gtfs-dir with --graph, or --network"),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    let violations = validate_network(&net);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("invalid network: {v}");
        }
        bail!("{} validation error(s)", violations.len());
    }

    if args.closed && !net.stop_footpaths_closed {
        let start = Instant::now();
        if !walk::check_stop_closure(&net) {
            bail!(
                "--closed requested, but the walking graph is not transitively closed over \
                 stops (some stop pair lacks a direct edge of exact shortest-walk weight)"
            );
        }
        println!("closure check: {:?}", start.elapsed());
        net = Network::build(net.stops, net.trips, net.graph, true);
    }

    save_network(&net, &args.out)?;
    println!(
        "wrote {} ({} stops, {} trips, {} vertices)",
        args.out.display(),
        net.stops.len(),
        net.trips.len(),
        net.graph.vertex_count()
    );

    if let Some(path) = &args.ch {
        let start = Instant::now();
        let ch = build_ch(&net.graph, None);
        println!("CH construction: {:?}", start.elapsed());
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        storage::save_ch(&ch, &mut BufWriter::new(file))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.core_ch {
        let start = Instant::now();
        let core = CoreChData::build_for(&net, args.core_degree);
        println!("Core-CH construction: {:?}", start.elapsed());
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        storage::save_core_ch(&core, &mut BufWriter::new(file))?;
        println!("wrote {} (core: {} vertices)", path.display(), core.core_vertex_count());
    }
    if let Some(path) = &args.buckets {
        let start = Instant::now();
        let buckets = StopBuckets::build(&net);
        println!("bucket construction: {:?}", start.elapsed());
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        storage::save_buckets(&buckets, &mut BufWriter::new(file))?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
