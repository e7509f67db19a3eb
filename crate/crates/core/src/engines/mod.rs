//! Earliest-arrival query engines.
//!
//! All engines answer the same question — earliest arrival at a target
//! vertex given a source vertex and departure time, with each boarding
//! (including at the first stop) delayed by the boarding stop's buffer —
//! and are cross-checked against each other and the reference oracle:
//!
//! * [`TadEngine`]: Dijkstra over the transfer graph that, on settling a
//!   stop, scans entire remaining trips from each departure board, so
//!   staying seated through a buffered stop costs nothing. Sound on every
//!   network, with or without buffers. Optional suffix-minimum pruning cuts
//!   scans that provably cannot improve the best arrival over the edge.
//! * [`TdEngine`]: classic time-dependent Dijkstra over dominance-filtered
//!   connection lists with one binary search per edge. Fast, but filtering
//!   is unsound once buffers make riding *through* a stop cheaper than
//!   reboarding there — see the `motivating` fixture.
//! * [`CsaEngine`]: a single chronological sweep over all connections with
//!   per-trip boarding flags. Requires stop-to-stop walking closure.
//! * [`MrEngine`]: round-based route scanning interleaved with walking
//!   relaxation on a core hierarchy's core graph.
//!
//! Walking transfers run in one of three [`TransferMode`]s: plain Dijkstra
//! on the full graph, Dijkstra restricted to a core-hierarchy core graph, or
//! bucket-accelerated batched distances on a full hierarchy.

mod csa;
mod driver;
mod labels;
mod mr;
mod tad;
mod td;

pub use csa::CsaEngine;
pub use mr::MrEngine;
pub use tad::{trip_pruning_trace, TadEngine};
pub use td::TdEngine;

use crate::model::{DepartureBoard, Network, Vertex};
use crate::time::Time;

/// One earliest-arrival question.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryRequest {
    pub source: Vertex,
    /// `None` asks for arrivals at every vertex (plain transfer mode only).
    pub target: Option<Vertex>,
    pub departure: Time,
    /// Enables suffix-minimum scan pruning where the engine supports it.
    pub pruning: bool,
}

impl QueryRequest {
    pub fn one_to_one(source: Vertex, target: Vertex, departure: Time) -> QueryRequest {
        QueryRequest { source, target: Some(target), departure, pruning: true }
    }
}

/// Work counters for one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Vertices settled by graph searches (connections scanned, for CSA).
    pub settled: u64,
    /// Trip scans (board entries expanded / routes scanned / catches).
    pub scanned_trips: u64,
    /// Walking edge relaxations.
    pub relaxed_edges: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryResult {
    pub arrival: Time,
    pub stats: QueryStats,
}

/// How walking transfers are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferMode {
    /// Dijkstra over the full transfer graph.
    Plain,
    /// Dijkstra over a core hierarchy's core graph, with partial hierarchy
    /// searches for the non-stop endpoints.
    CoreCh,
    /// Bucket queries on a full hierarchy for all walking legs.
    BucketCh,
}

impl TransferMode {
    pub fn name(self) -> &'static str {
        match self {
            TransferMode::Plain => "plain",
            TransferMode::CoreCh => "core-ch",
            TransferMode::BucketCh => "bucket-ch",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("vertex {vertex} out of range for network with {vertices} vertices")]
    InvalidVertex { vertex: Vertex, vertices: usize },
    #[error("preprocessing data does not fit this network: {reason}")]
    MismatchedData { reason: String },
    #[error("engine requires stop-to-stop walking closure, but the network is not closed")]
    ClosureRequired,
    #[error("{engine} cannot answer one-to-all queries; a target is required")]
    TargetRequired { engine: &'static str },
}

pub(crate) fn check_vertex(net: &Network, vertex: Vertex) -> Result<(), QueryError> {
    let vertices = net.graph.vertex_count();
    if (vertex as usize) < vertices {
        Ok(())
    } else {
        Err(QueryError::InvalidVertex { vertex, vertices })
    }
}

pub(crate) fn check_core(
    net: &Network,
    core: &crate::preprocess::CoreChData,
) -> Result<(), QueryError> {
    if core.vertex_count() != net.graph.vertex_count() {
        return Err(QueryError::MismatchedData {
            reason: format!(
                "core hierarchy covers {} vertices, network has {}",
                core.vertex_count(),
                net.graph.vertex_count()
            ),
        });
    }
    for stop in &net.stops {
        if !core.is_core[stop.vertex as usize] {
            return Err(QueryError::MismatchedData {
                reason: format!(
                    "stop {} (vertex {}) was contracted; rebuild the core hierarchy with stops protected",
                    stop.id, stop.vertex
                ),
            });
        }
    }
    Ok(())
}

pub(crate) fn check_buckets(
    net: &Network,
    bk: &crate::preprocess::StopBuckets,
) -> Result<(), QueryError> {
    if bk.ch.vertex_count() != net.graph.vertex_count() {
        return Err(QueryError::MismatchedData {
            reason: format!(
                "hierarchy covers {} vertices, network has {}",
                bk.ch.vertex_count(),
                net.graph.vertex_count()
            ),
        });
    }
    let stops: Vec<Vertex> = net.stops.iter().map(|s| s.vertex).collect();
    if bk.to_stops.targets != stops || bk.from_stops.targets != stops {
        return Err(QueryError::MismatchedData {
            reason: "bucket endpoints do not match the network's stop vertices".into(),
        });
    }
    Ok(())
}

/// The scan-pruning rule: stop scanning a board once even the best remaining
/// arrival (`suffix_min_arrival`) cannot beat the best arrival found plus
/// the alighting stop's boarding buffer.
///
/// Skipping is exact only for a strictly-greater comparison; the hidden
/// slack exists so verification tooling can inject an off-by-one variant
/// and prove its own ability to detect the fault.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PruneRule {
    slack: i64,
}

impl PruneRule {
    pub const EXACT: PruneRule = PruneRule { slack: 0 };

    #[doc(hidden)]
    pub fn with_slack(slack: i64) -> PruneRule {
        PruneRule { slack }
    }

    /// True when scanning can stop: a best arrival exists and every
    /// remaining entry arrives too late to matter.
    #[inline]
    pub fn should_break(self, suffix_min: Time, best: Time, beta_v: u32) -> bool {
        best.is_reachable()
            && i64::from(suffix_min.seconds())
                > i64::from(best.seconds()) + i64::from(beta_v) + self.slack
    }
}

/// Whether a traced board entry was expanded or cut off by pruning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanDecision {
    Scanned,
    Skipped,
}

/// Index of the first board entry boardable when reaching the edge's tail
/// stop at `tau` with boarding buffer `beta_u`.
///
/// Boards store buffer-adjusted departures (`departure − beta_u`, saturated
/// at zero) so this is one binary search; the saturated entries (raw
/// departure earlier than the buffer itself) compare as boardable at
/// `tau == 0` even though they are not, so that prefix is skipped
/// explicitly.
pub fn first_boardable(board: &DepartureBoard, tau: Time, beta_u: u32) -> usize {
    let mut i = board.boarding_departures.partition_point(|&d| d < tau);
    if tau == Time::ZERO && beta_u > 0 {
        while i < board.len() && board.departures[i].seconds() < beta_u {
            i += 1;
        }
    }
    i
}
