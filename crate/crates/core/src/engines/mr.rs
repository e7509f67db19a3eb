//! Round-based route scanning on a core hierarchy.
//!
//! Stops are grouped into routes (equal stop sequence, non-overtaking trip
//! order), so one pass along a route serves every trip on it: ride the
//! earliest caught trip, improve arrivals by alighting, and at each stop try
//! to catch an earlier trip using the current label plus the stop's boarding
//! buffer. Rounds alternate route scans over marked stops with a walking
//! Dijkstra on the core graph seeded from newly improved stops, until
//! nothing improves. Partial hierarchy searches attach arbitrary source and
//! target vertices to the core (stops are always protected into the core).
//!
//! Staying seated falls out of the route scan: the active trip is not
//! re-boarded at later stops, so no buffer applies along it.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use crate::engines::driver::SearchState;
use crate::engines::labels::StampSet;
use crate::engines::{check_core, check_vertex, QueryError, QueryRequest, QueryResult, QueryStats};
use crate::model::{Network, RouteIdx, StopIdx, Vertex};
use crate::preprocess::hierarchy::CoreChData;
use crate::time::Time;
use crate::walk::Dijkstra;

/// Hard bound on route-scan rounds; a correct search on a sane network
/// converges in far fewer, so exceeding it indicates a marking bug rather
/// than a long journey.
const MAX_ROUNDS: u32 = 16;

/// Round-based engine; always runs on a core hierarchy.
pub struct MrEngine<'a> {
    net: &'a Network,
    core: &'a CoreChData,
    state: SearchState,
    fwd: Dijkstra,
    bwd: Dijkstra,
    marked: Vec<StopIdx>,
    marked_set: StampSet,
}

impl<'a> MrEngine<'a> {
    pub fn new(net: &'a Network, core: &'a CoreChData) -> Result<MrEngine<'a>, QueryError> {
        check_core(net, core)?;
        let n = net.graph.vertex_count();
        Ok(MrEngine {
            net,
            core,
            state: SearchState::new(n),
            fwd: Dijkstra::new(n),
            bwd: Dijkstra::new(n),
            marked: Vec::new(),
            marked_set: StampSet::new(net.stops.len()),
        })
    }

    pub fn query(&mut self, req: &QueryRequest) -> Result<QueryResult, QueryError> {
        check_vertex(self.net, req.source)?;
        let target = req.target.ok_or(QueryError::TargetRequired { engine: "mr" })?;
        check_vertex(self.net, target)?;
        let mut stats = QueryStats::default();

        self.fwd.run(&self.core.up, req.source);
        self.bwd.run(&self.core.down, target);
        self.state.reset();
        self.marked.clear();
        self.marked_set.reset();

        // Seed: walking arrivals at core entry vertices, plus the walk-only
        // meet of the two partial hierarchy trees.
        let mut best = Time::UNREACHABLE;
        for i in 0..self.fwd.settled().len() {
            let (v, d) = self.fwd.settled()[i];
            let at = req.departure.plus(d);
            best = best.min(at.plus(self.bwd.dist(v)));
            if self.core.is_core[v as usize] && self.state.labels.improve(v, at) {
                self.state.heap.push(Reverse((at, v)));
                self.mark_vertex(v);
            }
        }
        best = self.transfer_phase(best, &mut stats);

        let mut round = 0;
        while !self.marked.is_empty() {
            round += 1;
            assert!(round <= MAX_ROUNDS, "route-scan failed to converge within {MAX_ROUNDS} rounds");

            // Routes serving marked stops, each from its first marked
            // position; BTreeMap fixes the scan order.
            let mut queue: BTreeMap<RouteIdx, u32> = BTreeMap::new();
            for &p in &self.marked {
                for &(r, pos) in &self.net.routes_at_stop[p as usize] {
                    queue.entry(r).and_modify(|m| *m = (*m).min(pos)).or_insert(pos);
                }
            }
            self.marked.clear();
            self.marked_set.reset();

            for (&r, &start_pos) in &queue {
                stats.scanned_trips += 1;
                best = self.scan_route(r, start_pos, best, &mut stats);
            }

            for i in 0..self.marked.len() {
                let v = self.net.vertex_of_stop(self.marked[i]);
                self.state.heap.push(Reverse((self.state.labels.get(v), v)));
            }
            best = self.transfer_phase(best, &mut stats);
        }
        Ok(QueryResult { arrival: best, stats })
    }

    /// Rides along one route from `start_pos`: alight improvements, then
    /// catching the earliest boardable trip at each stop.
    fn scan_route(&mut self, r: RouteIdx, start_pos: u32, mut best: Time, _stats: &mut QueryStats) -> Time {
        let route = &self.net.routes[r as usize];
        let mut active: Option<usize> = None;
        for pos in start_pos as usize..route.stops.len() {
            let p = route.stops[pos];
            let v = self.net.vertex_of_stop(p);
            if let Some(tr) = active {
                let arr = self.net.trips[route.trips[tr] as usize].events[pos].arrival;
                if self.state.labels.improve(v, arr) {
                    if self.marked_set.insert(p) {
                        self.marked.push(p);
                    }
                    best = best.min(arr.plus(self.bwd.dist(v)));
                }
            }
            let tau = self.state.labels.get(v);
            if tau.is_reachable() {
                let ready = tau.plus(self.net.buffer(p));
                let idx = route
                    .trips
                    .partition_point(|&ti| self.net.trips[ti as usize].events[pos].departure < ready);
                if idx < route.trips.len() && active.is_none_or(|a| idx < a) {
                    active = Some(idx);
                }
            }
        }
        best
    }

    /// Dijkstra over the core graph continuing from whatever is on the
    /// heap; marks stops it improves and folds target distances into `best`.
    fn transfer_phase(&mut self, mut best: Time, stats: &mut QueryStats) -> Time {
        while let Some(Reverse((t, u))) = self.state.heap.pop() {
            if t >= best {
                self.state.heap.clear();
                break;
            }
            if t > self.state.labels.get(u) {
                continue;
            }
            stats.settled += 1;
            best = best.min(t.plus(self.bwd.dist(u)));
            for &(v, w) in self.core.core.edges(u) {
                stats.relaxed_edges += 1;
                let nt = t.plus(w);
                if nt.is_reachable() && self.state.labels.improve(v, nt) {
                    self.state.heap.push(Reverse((nt, v)));
                    self.mark_vertex(v);
                }
            }
        }
        best
    }

    fn mark_vertex(&mut self, v: Vertex) {
        if let Some(p) = self.net.stop_at_vertex(v) {
            if self.marked_set.insert(p) {
                self.marked.push(p);
            }
        }
    }
}
