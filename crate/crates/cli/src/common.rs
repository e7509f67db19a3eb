//! Shared plumbing: artifact loading, engine/mode selection, time display.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use tad_core::preprocess::{CoreChData, StopBuckets};
use tad_core::{storage, Network, Time, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineKind {
    /// Transfer-aware Dijkstra: scans whole trips, exact with buffers
    Tad,
    /// Binary search on domination-filtered boards: exact only when all buffers are zero
    Td,
    /// Connection scan: exact with buffers, needs a closed stop graph
    Csa,
    /// Round-based route scanning on the core graph
    Mr,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Tad => "tad",
            EngineKind::Td => "td",
            EngineKind::Csa => "csa",
            EngineKind::Mr => "mr",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    /// Relax walking edges on the full transfer graph
    Plain,
    /// Relax walking on the contracted core, attach endpoints by partial searches
    CoreCh,
    /// Replace per-stop walking by precomputed bucket distances
    BucketCh,
}

impl ModeKind {
    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Plain => "plain",
            ModeKind::CoreCh => "core-ch",
            ModeKind::BucketCh => "bucket-ch",
        }
    }
}

pub fn load_network(path: &Path) -> Result<Network> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    storage::load_network(&mut BufReader::new(file))
        .with_context(|| format!("reading network from {}", path.display()))
}

pub fn save_network(net: &Network, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    storage::save_network(net, &mut w).with_context(|| format!("writing {}", path.display()))
}

/// Loads a core hierarchy from `path` if given, otherwise builds one
/// in-process (and says so, since that can dominate the wall time).
pub fn load_or_build_core(
    net: &Network,
    path: Option<&Path>,
    core_degree: f64,
) -> Result<CoreChData> {
    match path {
        Some(p) => {
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            storage::load_core_ch(&mut BufReader::new(file))
                .with_context(|| format!("reading core hierarchy from {}", p.display()))
        }
        None => {
            let start = Instant::now();
            let core = CoreChData::build_for(net, core_degree);
            eprintln!("note: built core hierarchy in-process ({:?}); pass --core-ch to reuse one", start.elapsed());
            Ok(core)
        }
    }
}

pub fn load_or_build_buckets(net: &Network, path: Option<&Path>) -> Result<StopBuckets> {
    match path {
        Some(p) => {
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            storage::load_buckets(&mut BufReader::new(file))
                .with_context(|| format!("reading bucket data from {}", p.display()))
        }
        None => {
            let start = Instant::now();
            let buckets = StopBuckets::build(net);
            eprintln!("note: built bucket data in-process ({:?}); pass --buckets to reuse it", start.elapsed());
            Ok(buckets)
        }
    }
}

/// Resolves a location argument: a bare number is a transfer-graph vertex,
/// anything else is looked up as a stop id.
pub fn parse_place(net: &Network, s: &str) -> Result<Vertex> {
    if let Ok(v) = s.parse::<Vertex>() {
        if (v as usize) < net.graph.vertex_count() {
            return Ok(v);
        }
        bail!("vertex {v} out of range (network has {} vertices)", net.graph.vertex_count());
    }
    for stop in &net.stops {
        if stop.id == s {
            return Ok(stop.vertex);
        }
    }
    bail!("{s:?} is neither a vertex number nor a known stop id");
}

/// `HH:MM:SS`, wrapping past 24h with an explicit day suffix
/// (`02:10:00 +1d`); `UNREACHABLE` for the sentinel.
pub fn display_arrival(t: Time) -> String {
    if !t.is_reachable() {
        return "UNREACHABLE".to_string();
    }
    let secs = t.seconds();
    if secs < 86_400 {
        return t.to_string();
    }
    let days = secs / 86_400;
    format!("{} +{days}d", Time::from_seconds(secs % 86_400))
}

pub fn network_is_buffered(net: &Network) -> bool {
    net.stops.iter().any(|s| s.buffer > 0)
}

/// Message used whenever the filtered engine is requested on a network
/// where filtering is unsound.
pub fn unsound_td_error() -> anyhow::Error {
    anyhow::anyhow!(
        "the td engine answers from domination-filtered boards, and filtering drops connections \
         that are only usable by staying seated through a buffered stop; on a network with \
         nonzero boarding buffers its answers can be wrong (it can even miss the only journey). \
         Pass --allow-unsound to run it anyway, or use tad/csa/mr."
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrival_display_wraps_days() {
        assert_eq!(display_arrival(Time::from_seconds(37_800)), "10:30:00");
        assert_eq!(display_arrival(Time::from_seconds(86_400 + 7_800)), "02:10:00 +1d");
        assert_eq!(display_arrival(Time::UNREACHABLE), "UNREACHABLE");
    }
}
