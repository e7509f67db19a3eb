//! `tad gen` — emit a random network or a named fixture.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;

use tad_core::model::{write_gtfs, write_transfer_graph};
use tad_core::netgen::{self, GenParams, FIXTURE_NAMES};

use crate::common::save_network;

#[derive(Args)]
pub struct GenArgs {
    /// Emit a named fixture instead of a random network
    #[arg(long, value_parser = FIXTURE_NAMES.to_vec())]
    fixture: Option<String>,

    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    stops: u32,
    /// Stop-free walking vertices on top of the stops
    #[arg(long, default_value_t = 40)]
    extra_vertices: u32,
    /// Base trips; non-FIFO clones come on top
    #[arg(long, default_value_t = 30)]
    trips: u32,
    #[arg(long, default_value_t = 2)]
    trip_len_min: u32,
    #[arg(long, default_value_t = 5)]
    trip_len_max: u32,
    /// Trips start uniformly within this many seconds after midnight
    #[arg(long, default_value_t = 86_400)]
    horizon: u32,
    /// Per-trip probability of a non-FIFO clone of its first leg
    #[arg(long, default_value_t = 0.3)]
    non_fifo_rate: f64,
    /// Per-stop probability of a nonzero boarding buffer
    #[arg(long, default_value_t = 0.5)]
    buffer_rate: f64,
    #[arg(long, default_value_t = 60)]
    buffer_min: u32,
    #[arg(long, default_value_t = 600)]
    buffer_max: u32,
    /// Target average out-degree of the walking graph
    #[arg(long, default_value_t = 4.0)]
    walk_degree: f64,
    /// Add exact shortest-walk edges between all stop pairs and mark the
    /// network transitively closed (required by the csa engine)
    #[arg(long)]
    closure: bool,

    /// Write the network in binary form
    #[arg(long)]
    network: Option<PathBuf>,
    /// Write timetable text files (stops/trips/stop_times/transfers) here
    #[arg(long, requires = "graph")]
    gtfs_dir: Option<PathBuf>,
    /// Write the walking graph as text (pairs with --gtfs-dir)
    #[arg(long, requires = "gtfs_dir")]
    graph: Option<PathBuf>,
}

pub fn run(args: GenArgs) -> Result<ExitCode> {
    if args.network.is_none() && args.gtfs_dir.is_none() {
        bail!("nothing to write: pass --network and/or --gtfs-dir with --graph");
    }

    let net = match &args.fixture {
        Some(name) => netgen::named_fixture(name)?,
        None => netgen::generate(&GenParams {
            seed: args.seed,
            stop_count: args.stops,
            extra_vertex_count: args.extra_vertices,
            trip_count: args.trips,
            trip_len: (args.trip_len_min, args.trip_len_max),
            horizon: args.horizon,
            non_fifo_rate: args.non_fifo_rate,
            buffer_rate: args.buffer_rate,
            buffer_range: (args.buffer_min, args.buffer_max),
            walk_degree: args.walk_degree,
            closure_mode: args.closure,
        })?,
    };

    if let Some(path) = &args.network {
        save_network(&net, path)?;
        println!("wrote {}", path.display());
    }
    if let Some(dir) = &args.gtfs_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_gtfs(&net, dir).with_context(|| format!("writing timetable to {}", dir.display()))?;
        println!("wrote {}", dir.display());
        let graph_path = args.graph.as_ref().expect("clap enforces --graph with --gtfs-dir");
        write_transfer_graph(&net.graph, graph_path)
            .with_context(|| format!("writing {}", graph_path.display()))?;
        println!("wrote {}", graph_path.display());
    }

    println!(
        "network: {} stops, {} trips, {} vertices, {} walking edges, {} connections{}",
        net.stops.len(),
        net.trips.len(),
        net.graph.vertex_count(),
        net.graph.edge_count(),
        net.connection_count(),
        if net.stop_footpaths_closed { ", closed stop footpaths" } else { "" }
    );
    Ok(ExitCode::SUCCESS)
}
