//! Network model: stops, trips, the walking transfer graph, and the derived
//! per-edge departure boards the query engines run on.
//!
//! A [`Network`] couples a timetable with a transfer graph. Stops are mapped
//! injectively onto transfer-graph vertices; the graph may contain many more
//! vertices than stops (road intersections). All derived state (departure
//! boards, route groups) is computed deterministically in [`Network::build`],
//! so two networks built from equal inputs compare equal field-for-field.

mod gtfs;
mod graph_io;

pub use gtfs::{parse_gtfs, write_gtfs, GtfsError, Timetable, TimetableStop};
pub use graph_io::{parse_transfer_graph, write_transfer_graph, GraphParseError};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::time::Time;

/// Transfer-graph vertex index.
pub type Vertex = u32;
/// Index into [`Network::stops`].
pub type StopIdx = u32;
/// Index into [`Network::trips`].
pub type TripIdx = u32;
/// Index into [`Network::routes`].
pub type RouteIdx = u32;

/// A scheduled stop with its boarding buffer and transfer-graph location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stop {
    pub id: String,
    /// Vertex this stop occupies in the transfer graph.
    pub vertex: Vertex,
    /// Minimum seconds between arriving at this stop (by transfer or walk)
    /// and boarding any trip. Seated passengers are exempt.
    pub buffer: u32,
}

/// One (arrival, departure) visit of a trip at a stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopEvent {
    pub stop: StopIdx,
    pub arrival: Time,
    pub departure: Time,
}

impl StopEvent {
    pub fn new(stop: StopIdx, arrival: Time, departure: Time) -> StopEvent {
        StopEvent { stop, arrival, departure }
    }
}

/// One vehicle's scheduled run through an ordered sequence of stop events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trip {
    pub id: String,
    pub route: String,
    /// At least 2 events on a valid network; weakly monotone times.
    pub events: Vec<StopEvent>,
}

/// Directed weighted graph of non-scheduled movement (walking).
///
/// Adjacency is normalized on [`Network::build`]: sorted by target, self
/// loops dropped, parallel edges collapsed to the cheapest.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferGraph {
    out: Vec<Vec<(Vertex, u32)>>,
}

impl TransferGraph {
    pub fn new(vertex_count: usize) -> TransferGraph {
        TransferGraph { out: vec![Vec::new(); vertex_count] }
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, weight: u32) {
        self.out[u as usize].push((v, weight));
    }

    #[inline]
    pub fn edges(&self, u: Vertex) -> &[(Vertex, u32)] {
        &self.out[u as usize]
    }

    /// The raw adjacency lists, for search code that is generic over
    /// graph-like structures (hierarchy edge lists share this shape).
    #[inline]
    pub fn adjacency(&self) -> &[Vec<(Vertex, u32)>] {
        &self.out
    }

    pub fn reversed(&self) -> TransferGraph {
        let mut rev = TransferGraph::new(self.vertex_count());
        for (u, list) in self.out.iter().enumerate() {
            for &(v, w) in list {
                rev.add_edge(v, u as Vertex, w);
            }
        }
        rev.normalize();
        rev
    }

    /// Sorts adjacency by target, drops self loops, and keeps only the
    /// cheapest of any parallel edges.
    pub fn normalize(&mut self) {
        for (u, list) in self.out.iter_mut().enumerate() {
            list.retain(|&(v, _)| v as usize != u);
            list.sort_unstable();
            list.dedup_by(|b, a| a.0 == b.0);
        }
    }
}

/// All connections of one transit edge (from-stop → to-stop), sorted by
/// `(departure, arrival, trip)`, in struct-of-arrays layout for the scan
/// loops. Duplicate departures are kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepartureBoard {
    /// Destination stop of every connection on this board.
    pub to: StopIdx,
    pub departures: Vec<Time>,
    /// `departure − β(from)`, saturated at 0: the boarding test collapses to
    /// `boarding_departures[i] ≥ τ_arr[u]`, saving an addition per probe.
    pub boarding_departures: Vec<Time>,
    /// Arrival at `to` of each connection.
    pub arrivals: Vec<Time>,
    pub trips: Vec<TripIdx>,
    /// Index of the departure event within its trip.
    pub positions: Vec<u32>,
    /// `suffix_min_arrival[i] = min(arrivals[i..])` — the best any remaining
    /// trip can reach `to`, which is what trip pruning compares against.
    pub suffix_min_arrival: Vec<Time>,
}

impl DepartureBoard {
    pub fn len(&self) -> usize {
        self.departures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.departures.is_empty()
    }
}

/// Trips sharing one stop sequence, split so that no trip overtakes another
/// (event-wise time order is total within a route).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub stops: Vec<StopIdx>,
    /// Sorted so each trip departs and arrives no earlier than its
    /// predecessor at every position.
    pub trips: Vec<TripIdx>,
}

/// An assembled, immutable transit network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub stops: Vec<Stop>,
    pub trips: Vec<Trip>,
    pub graph: TransferGraph,
    /// True when every indirectly walkable stop pair also has a direct
    /// stop-to-stop edge of shortest-path weight. Engines that scan
    /// connections chronologically require this.
    pub stop_footpaths_closed: bool,
    /// Departure boards per from-stop, sorted by destination stop.
    pub boards: Vec<Vec<DepartureBoard>>,
    /// Inverse of the stop→vertex mapping.
    pub stop_of_vertex: Vec<Option<StopIdx>>,
    pub routes: Vec<Route>,
    /// For each stop, every (route, position) where the route visits it.
    pub routes_at_stop: Vec<Vec<(RouteIdx, u32)>>,
}

impl Network {
    /// Assembles a network, computing all derived state deterministically.
    ///
    /// Lenient by design: structurally broken inputs (out-of-range vertices
    /// or stop indices) are skipped in the derived structures so that
    /// [`validate_network`] can report them instead of panicking.
    pub fn build(
        stops: Vec<Stop>,
        trips: Vec<Trip>,
        mut graph: TransferGraph,
        stop_footpaths_closed: bool,
    ) -> Network {
        assert!(stops.len() <= u32::MAX as usize && trips.len() <= u32::MAX as usize);
        graph.normalize();

        let mut stop_of_vertex = vec![None; graph.vertex_count()];
        for (i, stop) in stops.iter().enumerate() {
            if let Some(slot) = stop_of_vertex.get_mut(stop.vertex as usize) {
                if slot.is_none() {
                    *slot = Some(i as StopIdx);
                }
            }
        }

        let boards = build_boards(&stops, &trips);
        let (routes, routes_at_stop) = build_routes(&stops, &trips);

        Network {
            stops,
            trips,
            graph,
            stop_footpaths_closed,
            boards,
            stop_of_vertex,
            routes,
            routes_at_stop,
        }
    }

    #[inline]
    pub fn stop_at_vertex(&self, v: Vertex) -> Option<StopIdx> {
        self.stop_of_vertex.get(v as usize).copied().flatten()
    }

    #[inline]
    pub fn vertex_of_stop(&self, s: StopIdx) -> Vertex {
        self.stops[s as usize].vertex
    }

    #[inline]
    pub fn buffer(&self, s: StopIdx) -> u32 {
        self.stops[s as usize].buffer
    }

    /// True if any stop carries a nonzero boarding buffer.
    pub fn buffered(&self) -> bool {
        self.stops.iter().any(|s| s.buffer > 0)
    }

    /// Total number of connections (consecutive stop-event pairs).
    pub fn connection_count(&self) -> usize {
        self.boards.iter().flatten().map(DepartureBoard::len).sum()
    }

    /// Looks up a board by stop pair.
    pub fn board(&self, from: StopIdx, to: StopIdx) -> Option<&DepartureBoard> {
        self.boards.get(from as usize)?.iter().find(|b| b.to == to)
    }
}

/// One `(departure, arrival, trip, position)` row collected per stop pair
/// while grouping connections into boards.
type BoardRow = (Time, Time, TripIdx, u32);

fn build_boards(stops: &[Stop], trips: &[Trip]) -> Vec<Vec<DepartureBoard>> {
    let stop_count = stops.len();
    let mut groups: BTreeMap<(StopIdx, StopIdx), Vec<BoardRow>> = BTreeMap::new();
    for (ti, trip) in trips.iter().enumerate() {
        for (pos, pair) in trip.events.windows(2).enumerate() {
            let (from, to) = (&pair[0], &pair[1]);
            if from.stop as usize >= stop_count || to.stop as usize >= stop_count {
                continue;
            }
            groups
                .entry((from.stop, to.stop))
                .or_default()
                .push((from.departure, to.arrival, ti as TripIdx, pos as u32));
        }
    }

    let mut boards = vec![Vec::new(); stop_count];
    for ((from, to), mut entries) in groups {
        entries.sort_unstable();
        let beta = stops[from as usize].buffer;
        let n = entries.len();
        let mut board = DepartureBoard { to, ..DepartureBoard::default() };
        for &(dep, arr, trip, pos) in &entries {
            board.departures.push(dep);
            board
                .boarding_departures
                .push(Time::from_seconds(dep.seconds().saturating_sub(beta)));
            board.arrivals.push(arr);
            board.trips.push(trip);
            board.positions.push(pos);
        }
        let mut suffix = vec![Time::UNREACHABLE; n];
        let mut best = Time::UNREACHABLE;
        for i in (0..n).rev() {
            best = best.min(board.arrivals[i]);
            suffix[i] = best;
        }
        board.suffix_min_arrival = suffix;
        boards[from as usize].push(board);
    }
    boards
}

fn build_routes(stops: &[Stop], trips: &[Trip]) -> (Vec<Route>, Vec<Vec<(RouteIdx, u32)>>) {
    let mut seq_groups: BTreeMap<Vec<StopIdx>, Vec<TripIdx>> = BTreeMap::new();
    for (ti, trip) in trips.iter().enumerate() {
        let seq: Vec<StopIdx> = trip.events.iter().map(|e| e.stop).collect();
        seq_groups.entry(seq).or_default().push(ti as TripIdx);
    }

    let mut routes = Vec::new();
    for (seq, mut members) in seq_groups {
        members.sort_by_cached_key(|&t| {
            let key: Vec<(Time, Time)> = trips[t as usize]
                .events
                .iter()
                .map(|e| (e.arrival, e.departure))
                .collect();
            (key, t)
        });
        // Split into chains where no trip overtakes its predecessor at any
        // event, so round-based scans can treat each chain as totally ordered.
        let mut chains: Vec<Vec<TripIdx>> = Vec::new();
        'next_trip: for &t in &members {
            for chain in chains.iter_mut() {
                let last = *chain.last().unwrap();
                if precedes(&trips[last as usize], &trips[t as usize]) {
                    chain.push(t);
                    continue 'next_trip;
                }
            }
            chains.push(vec![t]);
        }
        for chain in chains {
            routes.push(Route { stops: seq.clone(), trips: chain });
        }
    }

    let mut routes_at_stop = vec![Vec::new(); stops.len()];
    for (ri, route) in routes.iter().enumerate() {
        for (pos, &s) in route.stops.iter().enumerate() {
            if (s as usize) < stops.len() {
                routes_at_stop[s as usize].push((ri as RouteIdx, pos as u32));
            }
        }
    }
    (routes, routes_at_stop)
}

/// True when `a` arrives and departs no later than `b` at every event.
fn precedes(a: &Trip, b: &Trip) -> bool {
    debug_assert_eq!(a.events.len(), b.events.len());
    a.events
        .iter()
        .zip(&b.events)
        .all(|(x, y)| x.arrival <= y.arrival && x.departure <= y.departure)
}

/// How stops are placed onto transfer-graph vertices.
#[derive(Clone, Copy, Debug)]
pub enum StopMapping<'a> {
    /// Stop `i` occupies vertex `i`.
    Identity,
    /// Explicit vertex per stop, same order as the timetable's stops.
    Explicit(&'a [Vertex]),
}

/// Error assembling a [`Network`] from a timetable and transfer graph.
#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("identity mapping needs {stops} vertices but the transfer graph has {vertices}")]
    IdentityTooSmall { stops: usize, vertices: usize },
    #[error("mapping supplies {supplied} vertices for {stops} stops")]
    MappingLength { supplied: usize, stops: usize },
    #[error("stop {stop:?} maps to vertex {vertex} but the transfer graph has {vertices} vertices")]
    VertexOutOfRange { stop: String, vertex: Vertex, vertices: usize },
    #[error("stops {first:?} and {second:?} both map to vertex {vertex}")]
    MappingCollision { first: String, second: String, vertex: Vertex },
}

/// Couples a parsed timetable with a transfer graph under a stop→vertex
/// mapping and derives all query-time structures.
pub fn assemble_network(
    timetable: Timetable,
    graph: TransferGraph,
    mapping: StopMapping<'_>,
) -> Result<Network, AssembleError> {
    let stop_count = timetable.stops.len();
    let vertices = graph.vertex_count();

    let resolved: Vec<Vertex> = match mapping {
        StopMapping::Identity => {
            if stop_count > vertices {
                return Err(AssembleError::IdentityTooSmall { stops: stop_count, vertices });
            }
            (0..stop_count as Vertex).collect()
        }
        StopMapping::Explicit(m) => {
            if m.len() != stop_count {
                return Err(AssembleError::MappingLength { supplied: m.len(), stops: stop_count });
            }
            m.to_vec()
        }
    };

    let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, &v) in resolved.iter().enumerate() {
        if (v as usize) >= vertices {
            return Err(AssembleError::VertexOutOfRange {
                stop: timetable.stops[i].id.clone(),
                vertex: v,
                vertices,
            });
        }
        if let Some(&first) = owner.get(&v) {
            return Err(AssembleError::MappingCollision {
                first: timetable.stops[first].id.clone(),
                second: timetable.stops[i].id.clone(),
                vertex: v,
            });
        }
        owner.insert(v, i);
    }

    let stops: Vec<Stop> = timetable
        .stops
        .into_iter()
        .zip(&resolved)
        .map(|(s, &vertex)| Stop { id: s.id, vertex, buffer: s.buffer })
        .collect();

    Ok(Network::build(stops, timetable.trips, graph, false))
}

/// One invariant violation found by [`validate_network`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn violation(violations: &mut Vec<Violation>, message: String) {
    violations.push(Violation { message });
}

/// Checks every model invariant and returns the full list of violations; an
/// empty report means the network is valid and engines may trust it.
pub fn validate_network(net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();
    let stop_count = net.stops.len();
    let vertices = net.graph.vertex_count();

    // Stop→vertex mapping: in range and injective.
    let mut seen_vertex: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, stop) in net.stops.iter().enumerate() {
        if stop.vertex as usize >= vertices {
            violation(
                &mut out,
                format!(
                    "stop {:?} mapped to out-of-range vertex {} ({} vertices)",
                    stop.id, stop.vertex, vertices
                ),
            );
        } else if let Some(&first) = seen_vertex.get(&stop.vertex) {
            violation(
                &mut out,
                format!(
                    "stops {:?} and {:?} both mapped to vertex {}",
                    net.stops[first].id, stop.id, stop.vertex
                ),
            );
        } else {
            seen_vertex.insert(stop.vertex, i);
        }
    }

    // Trips: length, stop indices, weakly monotone finite times.
    for trip in &net.trips {
        if trip.events.len() < 2 {
            violation(&mut out, format!("trip {:?} has fewer than 2 stop events", trip.id));
        }
        for (i, ev) in trip.events.iter().enumerate() {
            if ev.stop as usize >= stop_count {
                violation(
                    &mut out,
                    format!("trip {:?} event {} references unknown stop index {}", trip.id, i, ev.stop),
                );
            }
            if !ev.arrival.is_reachable() || !ev.departure.is_reachable() {
                violation(&mut out, format!("trip {:?} event {} has a non-finite time", trip.id, i));
            }
            if ev.arrival > ev.departure {
                violation(
                    &mut out,
                    format!(
                        "trip {:?} event {}: departure {} precedes arrival {}",
                        trip.id, i, ev.departure, ev.arrival
                    ),
                );
            }
        }
        for (i, pair) in trip.events.windows(2).enumerate() {
            if pair[0].departure > pair[1].arrival {
                violation(
                    &mut out,
                    format!(
                        "trip {:?}: arrival {} at event {} precedes departure {} at event {}",
                        trip.id,
                        pair[1].arrival,
                        i + 1,
                        pair[0].departure,
                        i
                    ),
                );
            }
        }
    }

    // Derived state consistency: boards and inverse mapping must match what
    // Network::build would produce for the current stops/trips.
    if net.boards != build_boards(&net.stops, &net.trips) {
        violation(&mut out, "departure boards are stale or inconsistent with the trips".to_string());
    } else {
        for boards in &net.boards {
            for board in boards {
                let n = board.len();
                let ok = board.boarding_departures.len() == n
                    && board.arrivals.len() == n
                    && board.trips.len() == n
                    && board.positions.len() == n
                    && board.suffix_min_arrival.len() == n;
                if !ok {
                    violation(&mut out, format!("board to stop {} has ragged columns", board.to));
                    continue;
                }
                if board.departures.windows(2).any(|w| w[0] > w[1]) {
                    violation(&mut out, format!("board to stop {} departures not sorted", board.to));
                }
                let mut best = Time::UNREACHABLE;
                for i in (0..n).rev() {
                    best = best.min(board.arrivals[i]);
                    if board.suffix_min_arrival[i] != best {
                        violation(
                            &mut out,
                            format!("board to stop {} suffix minimum wrong at index {}", board.to, i),
                        );
                        break;
                    }
                }
            }
        }
    }

    let (routes, routes_at_stop) = build_routes(&net.stops, &net.trips);
    if net.routes != routes || net.routes_at_stop != routes_at_stop {
        violation(&mut out, "route groups are stale or inconsistent with the trips".to_string());
    }

    let mut expected_inverse = vec![None; vertices];
    for (i, stop) in net.stops.iter().enumerate() {
        if let Some(slot) = expected_inverse.get_mut(stop.vertex as usize) {
            if slot.is_none() {
                *slot = Some(i as StopIdx);
            }
        }
    }
    if net.stop_of_vertex != expected_inverse {
        violation(&mut out, "stop_of_vertex index is stale".to_string());
    }

    out
}
