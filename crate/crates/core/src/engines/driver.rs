//! Shared query drivers: the outer Dijkstra loops for the three transfer
//! modes, generic over how an engine relaxes transit on settling a stop.
//!
//! A transit step receives the settled stop and its final arrival label and
//! improves labels (pushing to the heap) for whatever that engine's transit
//! relaxation reaches. Transit relaxations never decrease time, so the
//! combined search stays a valid Dijkstra.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::engines::labels::Labels;
use crate::engines::QueryStats;
use crate::model::{Network, StopIdx, Vertex};
use crate::preprocess::buckets::{
    bucket_many_to_one_into, bucket_one_to_many_into, StopBuckets,
};
use crate::preprocess::hierarchy::{ch_query_with, CoreChData};
use crate::time::Time;
use crate::walk::Dijkstra;

pub(crate) type Heap = BinaryHeap<Reverse<(Time, Vertex)>>;

/// Labels plus heap; the mutable state a transit step may touch.
pub(crate) struct SearchState {
    pub labels: Labels,
    pub heap: Heap,
}

impl SearchState {
    pub fn new(n: usize) -> SearchState {
        SearchState { labels: Labels::new(n), heap: BinaryHeap::new() }
    }

    pub fn reset(&mut self) {
        self.labels.reset();
        self.heap.clear();
    }

    #[inline]
    pub fn improve_push(&mut self, v: Vertex, t: Time) -> bool {
        if t.is_reachable() && self.labels.improve(v, t) {
            self.heap.push(Reverse((t, v)));
            true
        } else {
            false
        }
    }
}

/// A transit relaxation step: `(state, stats, stop, arrival at stop)`.
pub(crate) trait TransitStep {
    fn relax(&mut self, state: &mut SearchState, stats: &mut QueryStats, stop: StopIdx, tau: Time);
}

impl<F: FnMut(&mut SearchState, &mut QueryStats, StopIdx, Time)> TransitStep for F {
    fn relax(&mut self, state: &mut SearchState, stats: &mut QueryStats, stop: StopIdx, tau: Time) {
        self(state, stats, stop, tau)
    }
}

/// Dijkstra over the full transfer graph. With a target, stops at its
/// settling; without one, computes arrivals at every vertex (read them from
/// `state.labels` afterwards). Returns the target arrival.
pub(crate) fn drive_plain(
    net: &Network,
    state: &mut SearchState,
    stats: &mut QueryStats,
    source: Vertex,
    target: Option<Vertex>,
    departure: Time,
    mut transit: impl TransitStep,
) -> Time {
    state.reset();
    state.improve_push(source, departure);
    while let Some(Reverse((t, u))) = state.heap.pop() {
        if t > state.labels.get(u) {
            continue;
        }
        stats.settled += 1;
        if target == Some(u) {
            break;
        }
        if let Some(p) = net.stop_at_vertex(u) {
            transit.relax(state, stats, p, t);
        }
        for &(v, w) in net.graph.edges(u) {
            stats.relaxed_edges += 1;
            state.improve_push(v, t.plus(w));
        }
    }
    target.map_or(Time::UNREACHABLE, |t| state.labels.get(t))
}

/// Core-hierarchy drive: partial up/down searches connect the endpoints to
/// the core, the main Dijkstra runs on the core graph only.
///
/// The upward search from the source settles every core entry vertex at its
/// exact walking distance; the downward search from the target gives exact
/// core-to-target distances, folded into `best` as core vertices settle.
/// Walk-only journeys that never touch the core meet inside the two partial
/// trees and are covered by the initial sweep.
#[allow(clippy::too_many_arguments)]
pub(crate) fn drive_core(
    net: &Network,
    core: &CoreChData,
    state: &mut SearchState,
    stats: &mut QueryStats,
    fwd: &mut Dijkstra,
    bwd: &mut Dijkstra,
    source: Vertex,
    target: Vertex,
    departure: Time,
    mut transit: impl TransitStep,
) -> Time {
    fwd.run(&core.up, source);
    bwd.run(&core.down, target);
    state.reset();
    let mut best = Time::UNREACHABLE;
    for &(v, d) in fwd.settled() {
        let at = departure.plus(d);
        best = best.min(at.plus(bwd.dist(v)));
        if core.is_core[v as usize] {
            state.improve_push(v, at);
        }
    }
    while let Some(Reverse((t, u))) = state.heap.pop() {
        if t >= best {
            break;
        }
        if t > state.labels.get(u) {
            continue;
        }
        stats.settled += 1;
        best = best.min(t.plus(bwd.dist(u)));
        if let Some(p) = net.stop_at_vertex(u) {
            transit.relax(state, stats, p, t);
        }
        for &(v, w) in core.core.edges(u) {
            stats.relaxed_edges += 1;
            state.improve_push(v, t.plus(w));
        }
    }
    best
}

/// Bucket drive: the search runs over stop vertices only; every walking leg
/// (source to stops, stop to stops, stops to target, plus the walk-only
/// journey) is answered by hierarchy bucket queries.
///
/// `rows[p]` caches the stop-to-all-stops distance row, persisting across
/// queries.
#[allow(clippy::too_many_arguments)]
pub(crate) fn drive_bucket(
    net: &Network,
    bk: &StopBuckets,
    state: &mut SearchState,
    stats: &mut QueryStats,
    fwd: &mut Dijkstra,
    bwd: &mut Dijkstra,
    rows: &mut [Option<Box<[u32]>>],
    scratch: &mut Vec<u32>,
    source: Vertex,
    target: Vertex,
    departure: Time,
    mut transit: impl TransitStep,
) -> Time {
    let mut from_source = std::mem::take(scratch);
    bucket_one_to_many_into(&bk.ch, &bk.to_stops, source, fwd, &mut from_source);

    state.reset();
    for (p, stop) in net.stops.iter().enumerate() {
        state.improve_push(stop.vertex, departure.plus(from_source[p]));
    }

    // Reuse the scratch row for target distances; the seed values are done.
    let mut to_target = from_source;
    bucket_many_to_one_into(&bk.ch, &bk.from_stops, target, bwd, &mut to_target);
    let mut best = departure.plus(ch_query_with(&bk.ch, source, target, fwd, bwd));

    while let Some(Reverse((t, u))) = state.heap.pop() {
        if t >= best {
            break;
        }
        if t > state.labels.get(u) {
            continue;
        }
        stats.settled += 1;
        let p = net.stop_at_vertex(u).expect("bucket search only visits stop vertices");
        best = best.min(t.plus(to_target[p as usize]));
        transit.relax(state, stats, p, t);
        if rows[p as usize].is_none() {
            let mut row = Vec::new();
            bucket_one_to_many_into(&bk.ch, &bk.to_stops, u, fwd, &mut row);
            rows[p as usize] = Some(row.into_boxed_slice());
        }
        let row = rows[p as usize].as_ref().unwrap();
        for (q, stop) in net.stops.iter().enumerate() {
            stats.relaxed_edges += 1;
            state.improve_push(stop.vertex, t.plus(row[q]));
        }
    }
    *scratch = to_target;
    best
}
