//! Transfer-aware Dijkstra: the reference-quality engine that is sound on
//! every network, including non-FIFO schedules and boarding buffers.
//!
//! The search is an ordinary time-Dijkstra over the transfer graph, except
//! that settling a stop expands its departure boards: for each outgoing
//! transit edge, every boardable entry's *entire remaining trip* is scanned,
//! relaxing the arrival at each later stop. Scanning whole trips is what
//! keeps staying seated free of the alighting stop's boarding buffer.
//!
//! Per edge, entries are scanned in departure order while tracking the best
//! arrival over that edge; once the minimum arrival among the remaining
//! entries (a precomputed suffix minimum) exceeds the best found plus the
//! alighting stop's buffer, no remaining entry can matter — neither for
//! arriving there nor for transferring onward — and the scan stops early.

use crate::engines::driver::{drive_bucket, drive_core, drive_plain, SearchState};
use crate::engines::{
    check_buckets, check_core, check_vertex, first_boardable, PruneRule, QueryError, QueryRequest,
    QueryResult, QueryStats, ScanDecision, TransferMode,
};
use crate::model::{Network, StopIdx, TripIdx, Vertex};
use crate::preprocess::buckets::StopBuckets;
use crate::preprocess::hierarchy::CoreChData;
use crate::time::Time;
use crate::walk::Dijkstra;

#[derive(Clone, Copy)]
enum ModeData<'a> {
    Plain,
    Core(&'a CoreChData),
    Bucket(&'a StopBuckets),
}

/// Transfer-aware Dijkstra over plain, core-hierarchy, or bucket transfers.
///
/// The engine owns reusable search scratch; construct once per network and
/// query repeatedly.
pub struct TadEngine<'a> {
    net: &'a Network,
    mode: ModeData<'a>,
    state: SearchState,
    fwd: Dijkstra,
    bwd: Dijkstra,
    rows: Vec<Option<Box<[u32]>>>,
    scratch: Vec<u32>,
    rule: PruneRule,
}

impl<'a> TadEngine<'a> {
    pub fn new(net: &'a Network) -> TadEngine<'a> {
        Self::with_mode(net, ModeData::Plain)
    }

    pub fn with_core_ch(net: &'a Network, core: &'a CoreChData) -> Result<TadEngine<'a>, QueryError> {
        check_core(net, core)?;
        Ok(Self::with_mode(net, ModeData::Core(core)))
    }

    pub fn with_buckets(net: &'a Network, bk: &'a StopBuckets) -> Result<TadEngine<'a>, QueryError> {
        check_buckets(net, bk)?;
        Ok(Self::with_mode(net, ModeData::Bucket(bk)))
    }

    fn with_mode(net: &'a Network, mode: ModeData<'a>) -> TadEngine<'a> {
        let n = net.graph.vertex_count();
        TadEngine {
            net,
            mode,
            state: SearchState::new(n),
            fwd: Dijkstra::new(n),
            bwd: Dijkstra::new(n),
            rows: vec![None; net.stops.len()],
            scratch: Vec::new(),
            rule: PruneRule::EXACT,
        }
    }

    pub fn mode(&self) -> TransferMode {
        match self.mode {
            ModeData::Plain => TransferMode::Plain,
            ModeData::Core(_) => TransferMode::CoreCh,
            ModeData::Bucket(_) => TransferMode::BucketCh,
        }
    }

    /// Replaces the pruning rule. Exists for fault-injection in verification
    /// tooling; anything but [`PruneRule::EXACT`] voids the soundness
    /// guarantee of pruned scans.
    #[doc(hidden)]
    pub fn set_prune_rule(&mut self, rule: PruneRule) {
        self.rule = rule;
    }

    pub fn query(&mut self, req: &QueryRequest) -> Result<QueryResult, QueryError> {
        check_vertex(self.net, req.source)?;
        if let Some(t) = req.target {
            check_vertex(self.net, t)?;
        }
        let mut stats = QueryStats::default();
        let net = self.net;
        let rule = self.rule;
        let pruning = req.pruning;
        let transit = |state: &mut SearchState, stats: &mut QueryStats, p: StopIdx, tau: Time| {
            scan_boards(net, p, tau, rule, pruning, state, stats)
        };
        let arrival = match self.mode {
            ModeData::Plain => drive_plain(
                net,
                &mut self.state,
                &mut stats,
                req.source,
                req.target,
                req.departure,
                transit,
            ),
            ModeData::Core(core) => {
                let target = req
                    .target
                    .ok_or(QueryError::TargetRequired { engine: "tad in core-ch mode" })?;
                drive_core(
                    net,
                    core,
                    &mut self.state,
                    &mut stats,
                    &mut self.fwd,
                    &mut self.bwd,
                    req.source,
                    target,
                    req.departure,
                    transit,
                )
            }
            ModeData::Bucket(bk) => {
                let target = req
                    .target
                    .ok_or(QueryError::TargetRequired { engine: "tad in bucket-ch mode" })?;
                drive_bucket(
                    net,
                    bk,
                    &mut self.state,
                    &mut stats,
                    &mut self.fwd,
                    &mut self.bwd,
                    &mut self.rows,
                    &mut self.scratch,
                    req.source,
                    target,
                    req.departure,
                    transit,
                )
            }
        };
        Ok(QueryResult { arrival, stats })
    }

    /// Arrival label at `v` left by the most recent plain-mode query; the
    /// full one-to-all answer after a query with `target: None`.
    pub fn arrival_at(&self, v: Vertex) -> Time {
        self.state.labels.get(v)
    }
}

/// Expands all departure boards of stop `p`, settled at `tau`.
pub(crate) fn scan_boards(
    net: &Network,
    p: StopIdx,
    tau: Time,
    rule: PruneRule,
    pruning: bool,
    state: &mut SearchState,
    stats: &mut QueryStats,
) {
    let beta_u = net.buffer(p);
    for board in &net.boards[p as usize] {
        let start = first_boardable(board, tau, beta_u);
        if start >= board.len() {
            continue;
        }
        let beta_v = net.buffer(board.to);
        let mut best = Time::UNREACHABLE;
        for i in start..board.len() {
            if pruning && rule.should_break(board.suffix_min_arrival[i], best, beta_v) {
                break;
            }
            stats.scanned_trips += 1;
            scan_trip(net, board.trips[i], board.positions[i], state);
            best = best.min(board.arrivals[i]);
        }
    }
}

/// Relaxes arrivals at every stop after position `pos` of the trip.
fn scan_trip(net: &Network, trip: TripIdx, pos: u32, state: &mut SearchState) {
    let trip = &net.trips[trip as usize];
    for ev in &trip.events[pos as usize + 1..] {
        state.improve_push(net.vertex_of_stop(ev.stop), ev.arrival);
    }
}

/// Replays the scan of one board for a passenger ready to board at
/// `tau_board` (buffer already included), recording which entries a pruned
/// scan expands and which it cuts off. Empty when the stop pair has no
/// board.
pub fn trip_pruning_trace(
    net: &Network,
    from: StopIdx,
    to: StopIdx,
    tau_board: Time,
    rule: PruneRule,
) -> Vec<(TripIdx, ScanDecision)> {
    let Some(board) = net.board(from, to) else { return Vec::new() };
    let beta_v = net.buffer(to);
    let start = board.departures.partition_point(|&d| d < tau_board);
    let mut out = Vec::with_capacity(board.len() - start);
    let mut best = Time::UNREACHABLE;
    let mut cut = false;
    for i in start..board.len() {
        cut = cut || rule.should_break(board.suffix_min_arrival[i], best, beta_v);
        if cut {
            out.push((board.trips[i], ScanDecision::Skipped));
        } else {
            out.push((board.trips[i], ScanDecision::Scanned));
            best = best.min(board.arrivals[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Network, Stop, StopEvent, TransferGraph, Trip};
    use crate::netgen::{self, GenParams};
    use crate::oracle;
    use crate::preprocess::DEFAULT_CORE_DEGREE;
    use ScanDecision::{Scanned, Skipped};

    fn t(secs: u32) -> Time {
        Time::from_seconds(secs)
    }

    fn query(engine: &mut TadEngine, s: Vertex, tgt: Vertex, dep: u32) -> Time {
        engine.query(&QueryRequest::one_to_one(s, tgt, t(dep))).unwrap().arrival
    }

    #[test]
    fn staying_seated_beats_filtered_reboarding() {
        let net = netgen::named_fixture("motivating").unwrap();
        let mut engine = TadEngine::new(&net);
        assert_eq!(query(&mut engine, 0, 2, 28_800), t(37_800));
        assert_eq!(query(&mut engine, 0, 1, 28_800), t(34_200));
        assert_eq!(query(&mut engine, 0, 2, 30_601), Time::UNREACHABLE);
    }

    #[test]
    fn pruning_trace_on_the_pruning_fixture() {
        let net = netgen::named_fixture("pruning").unwrap();
        let trace = trip_pruning_trace(&net, 0, 1, t(28_800), PruneRule::EXACT);
        assert_eq!(trace, vec![(0, Scanned), (1, Scanned), (2, Skipped), (3, Skipped)]);
        // From a later boarding time the scan starts at T2 and T4's arrival
        // equals the suffix minimum bound only after β; with β(B)=0 it still
        // gets cut.
        let late = trip_pruning_trace(&net, 0, 1, t(30_500), PruneRule::EXACT);
        assert_eq!(late, vec![(3, Scanned)]);
    }

    /// Same schedule but with a large buffer at the destination stop: every
    /// entry might still enable an onward boarding, so nothing is pruned.
    #[test]
    fn destination_buffer_widens_the_pruning_bound() {
        let stops = vec![
            Stop { id: "A".into(), vertex: 0, buffer: 0 },
            Stop { id: "B".into(), vertex: 1, buffer: 3600 },
        ];
        let ev = |s, at| StopEvent::new(s, t(at), t(at));
        let trip = |id: &str, d, a| Trip {
            id: id.into(),
            route: id.into(),
            events: vec![ev(0, d), ev(1, a)],
        };
        let trips = vec![
            trip("T1", 28_800, 34_200),
            trip("T2", 29_400, 32_400),
            trip("T3", 30_000, 36_000),
            trip("T4", 30_600, 34_200),
        ];
        let net = Network::build(stops, trips, TransferGraph::new(2), true);
        let trace = trip_pruning_trace(&net, 0, 1, t(28_800), PruneRule::EXACT);
        assert_eq!(trace, vec![(0, Scanned), (1, Scanned), (2, Scanned), (3, Scanned)]);
    }

    /// An entry arriving exactly at `best + β` must still be scanned; only a
    /// strictly later suffix minimum may be cut. The hidden slack knob
    /// flips that boundary, and the trace is exactly where the difference
    /// shows (arrival results are unaffected on valid networks).
    #[test]
    fn off_by_one_pruning_is_visible_in_the_trace() {
        let stops = vec![
            Stop { id: "A".into(), vertex: 0, buffer: 0 },
            Stop { id: "B".into(), vertex: 1, buffer: 0 },
        ];
        let ev = |s, at| StopEvent::new(s, t(at), t(at));
        let trips = vec![
            Trip { id: "T1".into(), route: "r".into(), events: vec![ev(0, 100), ev(1, 200)] },
            Trip { id: "T2".into(), route: "r".into(), events: vec![ev(0, 150), ev(1, 200)] },
        ];
        let net = Network::build(stops, trips, TransferGraph::new(2), true);
        let exact = trip_pruning_trace(&net, 0, 1, t(0), PruneRule::EXACT);
        let faulty = trip_pruning_trace(&net, 0, 1, t(0), PruneRule::with_slack(-1));
        assert_eq!(exact, vec![(0, Scanned), (1, Scanned)]);
        assert_eq!(faulty, vec![(0, Scanned), (1, Skipped)]);
    }

    #[test]
    fn pruning_changes_work_but_never_arrivals() {
        for seed in 0..4 {
            let net = netgen::generate(&GenParams { seed, ..GenParams::default() }).unwrap();
            let mut engine = TadEngine::new(&net);
            for q in 0..8u32 {
                let source = (seed as u32 * 7 + q * 11) % net.graph.vertex_count() as u32;
                let target = (seed as u32 * 13 + q * 5) % net.graph.vertex_count() as u32;
                let dep = t(q * 9_000);
                let mut pruned = QueryRequest::one_to_one(source, target, dep);
                let exhaustive = QueryRequest { pruning: false, ..pruned };
                pruned.pruning = true;
                let a = engine.query(&pruned).unwrap();
                let b = engine.query(&exhaustive).unwrap();
                assert_eq!(a.arrival, b.arrival, "seed {seed} q {q}");
                assert!(a.stats.scanned_trips <= b.stats.scanned_trips);
                let want = oracle::oracle_query(&net, source, target, dep).unwrap();
                assert_eq!(a.arrival, want, "seed {seed} q {q}");
            }
        }
    }

    #[test]
    fn core_and_bucket_modes_match_plain() {
        for seed in 0..3 {
            let net = netgen::generate(&GenParams { seed, ..GenParams::default() }).unwrap();
            let core = CoreChData::build_for(&net, DEFAULT_CORE_DEGREE);
            let buckets = StopBuckets::build(&net);
            let mut plain = TadEngine::new(&net);
            let mut with_core = TadEngine::with_core_ch(&net, &core).unwrap();
            let mut with_buckets = TadEngine::with_buckets(&net, &buckets).unwrap();
            for q in 0..10u32 {
                let source = (q * 17 + seed as u32) % net.graph.vertex_count() as u32;
                let target = (q * 23 + 1) % net.graph.vertex_count() as u32;
                let dep = q * 8_000;
                let want = query(&mut plain, source, target, dep);
                assert_eq!(query(&mut with_core, source, target, dep), want, "core {seed}/{q}");
                assert_eq!(query(&mut with_buckets, source, target, dep), want, "bucket {seed}/{q}");
            }
        }
    }

    #[test]
    fn one_to_all_matches_individual_queries() {
        let net = netgen::generate(&GenParams {
            seed: 9,
            stop_count: 8,
            extra_vertex_count: 10,
            trip_count: 12,
            ..GenParams::default()
        })
        .unwrap();
        let mut engine = TadEngine::new(&net);
        let req =
            QueryRequest { source: 0, target: None, departure: t(20_000), pruning: true };
        engine.query(&req).unwrap();
        let all: Vec<Time> =
            (0..net.graph.vertex_count() as Vertex).map(|v| engine.arrival_at(v)).collect();
        let mut fresh = TadEngine::new(&net);
        for (v, &want) in all.iter().enumerate() {
            assert_eq!(query(&mut fresh, 0, v as Vertex, 20_000), want, "vertex {v}");
        }
        let want = oracle::oracle_arrivals(&net, 0, t(20_000)).unwrap();
        assert_eq!(all, want);
    }

    #[test]
    fn constructors_and_queries_validate_inputs() {
        let net = netgen::named_fixture("motivating").unwrap();
        let mut engine = TadEngine::new(&net);
        assert!(matches!(
            engine.query(&QueryRequest::one_to_one(0, 99, t(0))),
            Err(QueryError::InvalidVertex { vertex: 99, .. })
        ));

        let other = netgen::generate(&GenParams::default()).unwrap();
        let wrong_core = CoreChData::build_for(&other, DEFAULT_CORE_DEGREE);
        assert!(matches!(
            TadEngine::with_core_ch(&net, &wrong_core),
            Err(QueryError::MismatchedData { .. })
        ));
        let wrong_buckets = StopBuckets::build(&other);
        assert!(matches!(
            TadEngine::with_buckets(&net, &wrong_buckets),
            Err(QueryError::MismatchedData { .. })
        ));

        // A core hierarchy that contracted the stops is rejected up front.
        let unprotected = crate::preprocess::build_core_ch(&net.graph, &[], f64::INFINITY);
        assert!(matches!(
            TadEngine::with_core_ch(&net, &unprotected),
            Err(QueryError::MismatchedData { .. })
        ));

        let core = CoreChData::build_for(&net, DEFAULT_CORE_DEGREE);
        let mut core_engine = TadEngine::with_core_ch(&net, &core).unwrap();
        assert!(matches!(
            core_engine.query(&QueryRequest { source: 0, target: None, departure: t(0), pruning: true }),
            Err(QueryError::TargetRequired { .. })
        ));
    }
}
