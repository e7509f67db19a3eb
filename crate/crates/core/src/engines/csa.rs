//! Connection scan: one chronological sweep over every connection in the
//! network, with per-trip boarding flags.
//!
//! A connection is entered either because its trip is already flagged
//! (the passenger is seated — no buffer) or because the stop label plus the
//! stop's boarding buffer reaches its departure. Scanning by departure time
//! means each connection is looked at once; the sweep stops as soon as
//! departures can no longer beat the best target arrival.
//!
//! Walking is folded in three ways: initial labels come from a one-to-all
//! Dijkstra at the source, the target bound from a reversed-graph Dijkstra
//! at the target, and *mid-journey* transfers relax a single direct
//! stop-to-stop edge after each arrival improvement. The single hop is only
//! sufficient when every reachable stop pair has a direct edge of exactly
//! shortest-path weight, so construction requires a closed network.
//!
//! Caveat: connections are ordered by `(departure, arrival, trip, leg)`;
//! a zero-duration connection enabling an equal-departure boarding at its
//! own arrival instant can be ordered after it and missed. Schedules with
//! positive travel times (all generated networks) are unaffected.

use crate::engines::{
    check_vertex, QueryError, QueryRequest, QueryResult, QueryStats,
};
use crate::engines::labels::StampSet;
use crate::model::{Network, StopIdx, TransferGraph, TripIdx};
use crate::time::Time;
use crate::walk::Dijkstra;

struct Connection {
    dep: Time,
    arr: Time,
    trip: TripIdx,
    from: StopIdx,
    to: StopIdx,
}

/// Connection-scan engine. Requires `net.stop_footpaths_closed`.
pub struct CsaEngine<'a> {
    net: &'a Network,
    connections: Vec<Connection>,
    /// Per stop: direct walking edges to other stops `(stop, seconds)`.
    foot: Vec<Vec<(StopIdx, u32)>>,
    reversed: TransferGraph,
    taus: Vec<Time>,
    trip_flags: StampSet,
    d_src: Dijkstra,
    d_tgt: Dijkstra,
}

impl<'a> CsaEngine<'a> {
    pub fn new(net: &'a Network) -> Result<CsaEngine<'a>, QueryError> {
        if !net.stop_footpaths_closed {
            return Err(QueryError::ClosureRequired);
        }
        let mut connections = Vec::with_capacity(net.connection_count());
        for (ti, trip) in net.trips.iter().enumerate() {
            for pair in trip.events.windows(2) {
                connections.push(Connection {
                    dep: pair[0].departure,
                    arr: pair[1].arrival,
                    trip: ti as TripIdx,
                    from: pair[0].stop,
                    to: pair[1].stop,
                });
            }
        }
        connections.sort_by_key(|c| (c.dep, c.arr, c.trip, c.from));

        let foot = net
            .stops
            .iter()
            .map(|stop| {
                net.graph
                    .edges(stop.vertex)
                    .iter()
                    .filter_map(|&(v, w)| net.stop_at_vertex(v).map(|q| (q, w)))
                    .collect()
            })
            .collect();

        let n = net.graph.vertex_count();
        Ok(CsaEngine {
            net,
            connections,
            foot,
            reversed: net.graph.reversed(),
            taus: vec![Time::UNREACHABLE; net.stops.len()],
            trip_flags: StampSet::new(net.trips.len()),
            d_src: Dijkstra::new(n),
            d_tgt: Dijkstra::new(n),
        })
    }

    pub fn query(&mut self, req: &QueryRequest) -> Result<QueryResult, QueryError> {
        check_vertex(self.net, req.source)?;
        let target =
            req.target.ok_or(QueryError::TargetRequired { engine: "csa" })?;
        check_vertex(self.net, target)?;
        let mut stats = QueryStats::default();
        let net = self.net;

        self.d_src.run(net.graph.adjacency(), req.source);
        self.d_tgt.run(self.reversed.adjacency(), target);
        stats.relaxed_edges += 2 * net.graph.edge_count() as u64;

        for (p, stop) in net.stops.iter().enumerate() {
            self.taus[p] = req.departure.plus(self.d_src.dist(stop.vertex));
        }
        let mut best = req.departure.plus(self.d_src.dist(target));
        self.trip_flags.reset();

        for c in &self.connections {
            if c.dep >= best {
                break;
            }
            stats.settled += 1;
            let seated = self.trip_flags.contains(c.trip);
            let boardable = seated
                || c.dep >= self.taus[c.from as usize].plus(net.buffer(c.from));
            if !boardable {
                continue;
            }
            if !seated {
                self.trip_flags.insert(c.trip);
                stats.scanned_trips += 1;
            }
            if c.arr < self.taus[c.to as usize] {
                self.taus[c.to as usize] = c.arr;
                best = best.min(c.arr.plus(self.d_tgt.dist(net.vertex_of_stop(c.to))));
                for &(q, w) in &self.foot[c.to as usize] {
                    let at = c.arr.plus(w);
                    if at < self.taus[q as usize] {
                        self.taus[q as usize] = at;
                    }
                }
            }
        }
        Ok(QueryResult { arrival: best, stats })
    }
}
