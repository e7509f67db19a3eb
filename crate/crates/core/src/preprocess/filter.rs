//! Dominated-connection filtering.
//!
//! On one transit edge, connection `c1 = (d1, a1)` dominates `c2 = (d2, a2)`
//! when `d1 ≥ d2` and `a1 ≤ a2` with at least one inequality strict: a
//! passenger able to take `c2` can always take `c1` instead and arrive no
//! later. Removing dominated connections restores the FIFO property (later
//! departures never arrive earlier), which per-edge binary-search engines
//! rely on — and which is exactly the step that loses journeys once boarding
//! buffers exist, since "can always take `c1` instead" stops being true when
//! the switch costs a buffer wait.

use crate::model::{DepartureBoard, Network, StopIdx, TripIdx};
use crate::time::Time;

/// One scheduled ride over a single transit edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Connection {
    pub dep: Time,
    pub arr: Time,
    pub trip: TripIdx,
    /// Index of the departure event within the trip.
    pub pos: u32,
}

/// Extracts a board's columns as [`Connection`] values (already sorted by
/// `(dep, arr, trip)`).
pub fn board_connections(board: &DepartureBoard) -> Vec<Connection> {
    (0..board.len())
        .map(|i| Connection {
            dep: board.departures[i],
            arr: board.arrivals[i],
            trip: board.trips[i],
            pos: board.positions[i],
        })
        .collect()
}

/// Removes every dominated connection from a departure-sorted list.
///
/// Exact `(dep, arr)` duplicates dominate each other under the "at least one
/// strict" rule read both ways; to keep the output deterministic and strictly
/// FIFO, the duplicate occurring last in `(dep, arr, trip)` order survives.
/// The output departs strictly later and arrives strictly later entry over
/// entry.
pub fn filter_dominated(connections: &[Connection]) -> Vec<Connection> {
    debug_assert!(
        connections.windows(2).all(|w| w[0].dep <= w[1].dep),
        "input must be sorted by departure"
    );
    let mut sorted: Vec<Connection> = connections.to_vec();
    sorted.sort_unstable();

    let mut kept: Vec<Connection> = Vec::new();
    for c in sorted {
        // Anything already kept that departs no later and arrives no earlier
        // than `c` is dominated by it (ties fall to `c`, the later entry).
        while kept.last().is_some_and(|k| k.arr >= c.arr) {
            kept.pop();
        }
        // If an equal-departure survivor remains, it arrives strictly
        // earlier and therefore dominates `c`.
        if kept.last().is_some_and(|k| k.dep == c.dep) {
            continue;
        }
        kept.push(c);
    }

    debug_assert!(kept.windows(2).all(|w| w[0].dep < w[1].dep && w[0].arr < w[1].arr));
    kept
}

/// All departure boards of a network with dominated connections removed; the
/// per-edge timetable view used by the FIFO binary-search engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredBoards {
    /// Indexed like [`Network::boards`]: per from-stop, sorted by `to`.
    pub boards: Vec<Vec<FilteredBoard>>,
}

/// One filtered edge: strictly increasing departures and arrivals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredBoard {
    pub to: StopIdx,
    pub departures: Vec<Time>,
    pub arrivals: Vec<Time>,
}

impl FilteredBoards {
    pub fn build(net: &Network) -> FilteredBoards {
        let boards = net
            .boards
            .iter()
            .map(|list| {
                list.iter()
                    .map(|board| {
                        let kept = filter_dominated(&board_connections(board));
                        FilteredBoard {
                            to: board.to,
                            departures: kept.iter().map(|c| c.dep).collect(),
                            arrivals: kept.iter().map(|c| c.arr).collect(),
                        }
                    })
                    .collect()
            })
            .collect();
        FilteredBoards { boards }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conn(dep: u32, arr: u32, trip: TripIdx) -> Connection {
        Connection { dep: Time::from_seconds(dep), arr: Time::from_seconds(arr), trip, pos: 0 }
    }

    #[test]
    fn later_but_faster_connection_dominates() {
        // 08:00→09:40 loses to 08:30→09:30.
        let input = vec![conn(28800, 34800, 0), conn(30600, 34200, 1)];
        assert_eq!(filter_dominated(&input), vec![conn(30600, 34200, 1)]);
    }

    #[test]
    fn single_connection_is_unchanged() {
        let input = vec![conn(100, 200, 0)];
        assert_eq!(filter_dominated(&input), input);
    }

    #[test]
    fn fifo_input_is_unchanged() {
        let input = vec![conn(10, 20, 0), conn(15, 25, 1), conn(30, 31, 2)];
        assert_eq!(filter_dominated(&input), input);
    }

    #[test]
    fn equal_pairs_keep_one_survivor() {
        let input = vec![conn(10, 20, 0), conn(10, 20, 1), conn(10, 20, 2)];
        assert_eq!(filter_dominated(&input), vec![conn(10, 20, 2)]);
    }

    #[test]
    fn equal_departure_keeps_earliest_arrival() {
        let input = vec![conn(10, 30, 0), conn(10, 20, 1), conn(10, 40, 2)];
        assert_eq!(filter_dominated(&input), vec![conn(10, 20, 1)]);
    }

    #[test]
    fn empty_input_yields_empty_output() {
        assert!(filter_dominated(&[]).is_empty());
    }
}
