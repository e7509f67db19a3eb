//! Seeded random network generation for randomized cross-checking, plus a
//! few tiny hand-built fixture networks with known-interesting structure.
//!
//! Generation is fully deterministic for a given [`GenParams`]: the RNG is
//! `ChaCha8` seeded from `seed`, and draws happen in a fixed documented
//! order (vertex positions, then stop buffers, then trips, then non-FIFO
//! clones), so equal parameters produce field-for-field equal networks on
//! every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Network, Stop, StopEvent, StopIdx, TransferGraph, Trip, Vertex};
use crate::time::Time;
use crate::walk;

/// Walking speed used to weight geometric edges: seconds per kilometer
/// (4.5 km/h).
const SECONDS_PER_KM: f64 = 800.0;

/// Probability that a new trip reuses an existing stop sequence, forming
/// multi-trip routes.
const SEQUENCE_REUSE_RATE: f64 = 0.4;

/// Parameters for [`generate`].
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    /// Number of stops; stop `i` sits on vertex `i`.
    pub stop_count: u32,
    /// Additional stop-free transfer-graph vertices (road network).
    pub extra_vertex_count: u32,
    /// Number of base trips; non-FIFO clones come on top of this.
    pub trip_count: u32,
    /// Inclusive (min, max) events per trip; min must be at least 2.
    pub trip_len: (u32, u32),
    /// Trips start uniformly in `[0, horizon)` seconds.
    pub horizon: u32,
    /// Per-trip probability of adding a clone of its first leg that departs
    /// later yet arrives earlier, making that edge's schedule non-FIFO.
    /// Any positive rate guarantees at least one clone.
    pub non_fifo_rate: f64,
    /// Per-stop probability of a nonzero boarding buffer.
    pub buffer_rate: f64,
    /// Inclusive bounds for nonzero buffers, in seconds.
    pub buffer_range: (u32, u32),
    /// Target average out-degree of the random geometric walking graph.
    pub walk_degree: f64,
    /// Insert a direct walking edge of exactly shortest-path weight for
    /// every ordered reachable stop pair, and mark the network closed.
    pub closure_mode: bool,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            seed: 0,
            stop_count: 20,
            extra_vertex_count: 40,
            trip_count: 30,
            trip_len: (2, 5),
            horizon: 86_400,
            non_fifo_rate: 0.3,
            buffer_rate: 0.5,
            buffer_range: (60, 600),
            walk_degree: 4.0,
            closure_mode: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    BadParam(String),
    #[error("unknown fixture `{}`; available: {}", .0, FIXTURE_NAMES.join(", "))]
    UnknownFixture(String),
}

/// Names accepted by [`named_fixture`].
pub const FIXTURE_NAMES: &[&str] = &["motivating", "nonfifo_intro", "pruning"];

fn validate(p: &GenParams) -> Result<(), GenError> {
    let bad = |msg: String| Err(GenError::BadParam(msg));
    for (name, rate) in [("non_fifo_rate", p.non_fifo_rate), ("buffer_rate", p.buffer_rate)] {
        if !(0.0..=1.0).contains(&rate) {
            return bad(format!("{name} must be within [0, 1], got {rate}"));
        }
    }
    if !p.walk_degree.is_finite() || p.walk_degree < 0.0 {
        return bad(format!("walk_degree must be finite and non-negative, got {}", p.walk_degree));
    }
    if p.horizon == 0 {
        return bad("horizon must be positive".into());
    }
    if p.trip_len.0 < 2 {
        return bad(format!("trip_len minimum must be at least 2, got {}", p.trip_len.0));
    }
    if p.trip_len.1 < p.trip_len.0 {
        return bad(format!("trip_len range ({}, {}) is inverted", p.trip_len.0, p.trip_len.1));
    }
    if p.buffer_range.1 < p.buffer_range.0 {
        return bad(format!(
            "buffer_range ({}, {}) is inverted",
            p.buffer_range.0, p.buffer_range.1
        ));
    }
    if p.trip_count > 0 && p.trip_len.1 > p.stop_count {
        return bad(format!(
            "trips need {} distinct stops but only {} exist",
            p.trip_len.1, p.stop_count
        ));
    }
    if p.stop_count.checked_add(p.extra_vertex_count).is_none() {
        return bad("stop_count + extra_vertex_count overflows".into());
    }
    Ok(())
}

/// Generates a random network. Deterministic per parameter set.
pub fn generate(params: &GenParams) -> Result<Network, GenError> {
    validate(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = (params.stop_count + params.extra_vertex_count) as usize;

    // 1. Vertex positions, uniform in a 1 km × 1 km square.
    let positions: Vec<(f64, f64)> =
        (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();

    // 2. Random geometric walking graph: connect pairs within radius r,
    // chosen so the expected out-degree is walk_degree. No randomness here
    // beyond the positions.
    let mut graph = TransferGraph::new(n);
    if n >= 2 {
        let r = (params.walk_degree / ((n - 1) as f64 * std::f64::consts::PI)).sqrt();
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (positions[i].0 - positions[j].0, positions[i].1 - positions[j].1);
                let dist_km = (dx * dx + dy * dy).sqrt();
                if dist_km <= r {
                    let weight = (dist_km * SECONDS_PER_KM).round().max(1.0) as u32;
                    graph.add_edge(i as Vertex, j as Vertex, weight);
                    graph.add_edge(j as Vertex, i as Vertex, weight);
                }
            }
        }
    }

    // 3. Stop buffers.
    let stops: Vec<Stop> = (0..params.stop_count)
        .map(|i| {
            let buffer = if params.buffer_rate > 0.0 && rng.random_bool(params.buffer_rate) {
                rng.random_range(params.buffer_range.0..=params.buffer_range.1)
            } else {
                0
            };
            Stop { id: format!("S{i}"), vertex: i, buffer }
        })
        .collect();

    // 4. Base trips. Stop sequences are drawn fresh (distinct stops via a
    // partial shuffle) or reused from an earlier trip, forming routes.
    let mut sequences: Vec<Vec<StopIdx>> = Vec::new();
    let mut pool: Vec<StopIdx> = (0..params.stop_count).collect();
    let mut trips: Vec<Trip> = Vec::new();
    for t in 0..params.trip_count {
        let seq_idx = if !sequences.is_empty() && rng.random_bool(SEQUENCE_REUSE_RATE) {
            rng.random_range(0..sequences.len())
        } else {
            let len = rng.random_range(params.trip_len.0..=params.trip_len.1) as usize;
            let (picked, _) = pool.partial_shuffle(&mut rng, len);
            sequences.push(picked.to_vec());
            sequences.len() - 1
        };
        let sequence = sequences[seq_idx].clone();
        let start = Time::from_seconds(rng.random_range(0..params.horizon));
        let mut events = Vec::with_capacity(sequence.len());
        events.push(StopEvent::new(sequence[0], start, start));
        for (k, &stop) in sequence.iter().enumerate().skip(1) {
            let travel = rng.random_range(60..=900);
            let arrival = events[k - 1].departure.plus(travel);
            let dwell = if k + 1 < sequence.len() { rng.random_range(0..=120) } else { 0 };
            events.push(StopEvent::new(stop, arrival, arrival.plus(dwell)));
        }
        trips.push(Trip { id: format!("T{t}"), route: format!("R{seq_idx}"), events });
    }

    // 5. Non-FIFO clones: duplicate a trip's first leg shifted inward
    // (departs δ later, arrives δ earlier), which makes the original first
    // connection dominated. A positive rate guarantees at least one clone.
    let base_count = trips.len();
    let mut cloned_any = false;
    let mut clones = Vec::new();
    for (t, trip) in trips.iter().enumerate().take(base_count) {
        if params.non_fifo_rate > 0.0 && rng.random_bool(params.non_fifo_rate) {
            let delta = {
                let gap = trip.events[1].arrival.seconds() - trip.events[0].departure.seconds();
                rng.random_range(1..=gap / 2)
            };
            clones.push(make_clone(trip, t, delta));
            cloned_any = true;
        }
    }
    if !cloned_any && params.non_fifo_rate > 0.0 && base_count > 0 {
        let gap = trips[0].events[1].arrival.seconds() - trips[0].events[0].departure.seconds();
        clones.push(make_clone(&trips[0], 0, gap / 2));
    }
    trips.extend(clones);

    // 6. Stop-closure edges: exact shortest-path direct edges between every
    // ordered reachable stop pair, computed on the graph before insertion
    // (inserting an edge equal to the current shortest distance preserves
    // all distances).
    if params.closure_mode {
        let mut rows = Vec::with_capacity(stops.len());
        for stop in &stops {
            rows.push(walk::one_to_all(&graph, stop.vertex));
        }
        for (a, row) in rows.iter().enumerate() {
            for (b, other) in stops.iter().enumerate() {
                let d = row[other.vertex as usize];
                if a != b && d != crate::time::INF_DUR {
                    graph.add_edge(stops[a].vertex, other.vertex, d);
                }
            }
        }
    }

    let net = Network::build(stops, trips, graph, params.closure_mode);
    debug_assert!(crate::model::validate_network(&net).is_empty());
    Ok(net)
}

fn make_clone(base: &Trip, t: usize, delta: u32) -> Trip {
    let dep = base.events[0].departure.plus(delta);
    let arr = Time::from_seconds(base.events[1].arrival.seconds() - delta);
    Trip {
        id: format!("T{t}x"),
        route: base.route.clone(),
        events: vec![
            StopEvent::new(base.events[0].stop, dep, dep),
            StopEvent::new(base.events[1].stop, arr, arr),
        ],
    }
}

/// Builds one of the tiny named fixture networks.
///
/// * `motivating` — stops A,B,C with a 1200 s buffer at B; a through trip
///   A→B→C and a faster A→B feeder. Staying seated through B is the only way
///   to reach C, and dominance-filtering the A→B edge breaks the journey.
/// * `nonfifo_intro` — two trips on one edge where the later departure
///   arrives earlier (minimal non-FIFO schedule).
/// * `pruning` — four trips on one edge arranged so a scan from the earliest
///   departure can stop after two trips: the suffix of remaining arrivals
///   can no longer improve on the best found.
pub fn named_fixture(name: &str) -> Result<Network, GenError> {
    let stop = |id: &str, vertex: Vertex, buffer: u32| Stop { id: id.into(), vertex, buffer };
    let t = Time::from_seconds;
    let trip = |id: &str, events: Vec<StopEvent>| Trip { id: id.into(), route: id.into(), events };
    let ev = |s: StopIdx, at: u32| StopEvent::new(s, t(at), t(at));

    let (stops, trips) = match name {
        "motivating" => (
            vec![stop("A", 0, 0), stop("B", 1, 1200), stop("C", 2, 0)],
            vec![
                trip("T1", vec![ev(0, 28_800), ev(1, 34_800), ev(2, 37_800)]),
                trip("T2", vec![ev(0, 30_600), ev(1, 34_200)]),
            ],
        ),
        "nonfifo_intro" => (
            vec![stop("A", 0, 0), stop("B", 1, 0)],
            vec![
                trip("T1", vec![ev(0, 28_800), ev(1, 34_200)]),
                trip("T2", vec![ev(0, 30_600), ev(1, 32_400)]),
            ],
        ),
        "pruning" => (
            vec![stop("A", 0, 0), stop("B", 1, 0)],
            vec![
                trip("T1", vec![ev(0, 28_800), ev(1, 34_200)]),
                trip("T2", vec![ev(0, 29_400), ev(1, 32_400)]),
                trip("T3", vec![ev(0, 30_000), ev(1, 36_000)]),
                trip("T4", vec![ev(0, 30_600), ev(1, 34_200)]),
            ],
        ),
        other => return Err(GenError::UnknownFixture(other.to_string())),
    };
    let vertex_count = stops.len();
    Ok(Network::build(stops, trips, TransferGraph::new(vertex_count), true))
}
