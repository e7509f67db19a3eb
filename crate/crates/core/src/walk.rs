//! Plain Dijkstra searches over weighted adjacency lists.
//!
//! Used for walking legs (source/target expansion), as the reference oracle
//! for every hierarchy-based distance primitive, and as the building block of
//! the contraction searches. Priority ties break by vertex index, so results
//! and iteration orders are deterministic.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::model::{Network, TransferGraph, Vertex};
use crate::time::{dur_add, INF_DUR};

/// Reusable single-source Dijkstra with O(1) reset between runs.
pub struct Dijkstra {
    dist: Vec<u32>,
    stamp: Vec<u32>,
    generation: u32,
    heap: BinaryHeap<Reverse<(u32, Vertex)>>,
    settled: Vec<(Vertex, u32)>,
}

impl Dijkstra {
    pub fn new(vertex_count: usize) -> Dijkstra {
        Dijkstra {
            dist: vec![INF_DUR; vertex_count],
            stamp: vec![0; vertex_count],
            generation: 0,
            heap: BinaryHeap::new(),
            settled: Vec::new(),
        }
    }

    /// Runs to exhaustion from `source` over `adj` (which may be any
    /// adjacency structure sharing this search's vertex space, e.g. a
    /// transfer graph or a hierarchy's upward edges).
    pub fn run(&mut self, adj: &[Vec<(Vertex, u32)>], source: Vertex) {
        self.run_until(adj, source, None);
    }

    /// Runs from `source` until `target` is settled; returns its distance.
    pub fn run_to(&mut self, adj: &[Vec<(Vertex, u32)>], source: Vertex, target: Vertex) -> u32 {
        self.run_until(adj, source, Some(target));
        self.dist(target)
    }

    fn run_until(&mut self, adj: &[Vec<(Vertex, u32)>], source: Vertex, target: Option<Vertex>) {
        debug_assert_eq!(adj.len(), self.dist.len());
        self.generation = match self.generation.checked_add(1) {
            Some(g) => g,
            None => {
                self.stamp.fill(0);
                1
            }
        };
        self.heap.clear();
        self.settled.clear();

        self.set(source, 0);
        self.heap.push(Reverse((0, source)));
        while let Some(Reverse((d, u))) = self.heap.pop() {
            if d > self.dist(u) {
                continue; // stale entry
            }
            self.settled.push((u, d));
            if target == Some(u) {
                return;
            }
            for &(v, w) in &adj[u as usize] {
                let nd = dur_add(d, w);
                if nd < self.dist(v) {
                    self.set(v, nd);
                    self.heap.push(Reverse((nd, v)));
                }
            }
        }
    }

    #[inline]
    fn set(&mut self, v: Vertex, d: u32) {
        self.dist[v as usize] = d;
        self.stamp[v as usize] = self.generation;
    }

    /// Distance of the last run; `INF_DUR` when unreached.
    #[inline]
    pub fn dist(&self, v: Vertex) -> u32 {
        if self.stamp[v as usize] == self.generation {
            self.dist[v as usize]
        } else {
            INF_DUR
        }
    }

    /// Vertices settled by the last run, in settling order.
    #[inline]
    pub fn settled(&self) -> &[(Vertex, u32)] {
        &self.settled
    }
}

/// One-shot single-source shortest distances over a transfer graph.
pub fn one_to_all(graph: &TransferGraph, source: Vertex) -> Vec<u32> {
    let mut search = Dijkstra::new(graph.vertex_count());
    search.run(graph.adjacency(), source);
    (0..graph.vertex_count() as Vertex).map(|v| search.dist(v)).collect()
}

/// One-shot point-to-point shortest distance.
pub fn one_to_one(graph: &TransferGraph, source: Vertex, target: Vertex) -> u32 {
    let mut search = Dijkstra::new(graph.vertex_count());
    search.run_to(graph.adjacency(), source, target)
}

/// Checks whether every walkable ordered stop pair has a direct stop-to-stop
/// edge of exactly shortest-path weight.
///
/// This is the precondition under which single-hop footpath relaxation in a
/// chronological connection scan is complete, i.e. what
/// [`Network::stop_footpaths_closed`] asserts.
pub fn check_stop_closure(net: &Network) -> bool {
    let mut search = Dijkstra::new(net.graph.vertex_count());
    for a in 0..net.stops.len() {
        let va = net.stops[a].vertex;
        search.run(net.graph.adjacency(), va);
        for b in 0..net.stops.len() {
            if a == b {
                continue;
            }
            let vb = net.stops[b].vertex;
            let d = search.dist(vb);
            if d == INF_DUR {
                continue;
            }
            // Normalized adjacency has at most one edge per target.
            let direct = net
                .graph
                .edges(va)
                .binary_search_by_key(&vb, |&(v, _)| v)
                .map(|i| net.graph.edges(va)[i].1);
            if direct != Ok(d) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Network, Stop, TransferGraph};

    fn diamond() -> TransferGraph {
        // 0 → 1 → 3,  0 → 2 → 3 (cheaper), plus a long direct 0 → 3
        let mut g = TransferGraph::new(5);
        g.add_edge(0, 1, 10);
        g.add_edge(1, 3, 10);
        g.add_edge(0, 2, 3);
        g.add_edge(2, 3, 4);
        g.add_edge(0, 3, 100);
        g.normalize();
        g
    }

    #[test]
    fn finds_shortest_distances() {
        let g = diamond();
        let d = one_to_all(&g, 0);
        assert_eq!(d, vec![0, 10, 3, 7, INF_DUR]);
        assert_eq!(one_to_one(&g, 0, 3), 7);
        assert_eq!(one_to_one(&g, 3, 0), INF_DUR);
        assert_eq!(one_to_one(&g, 4, 4), 0);
    }

    #[test]
    fn reusable_search_resets_between_runs() {
        let g = diamond();
        let mut s = Dijkstra::new(g.vertex_count());
        s.run(g.adjacency(), 0);
        assert_eq!(s.dist(3), 7);
        s.run(g.adjacency(), 1);
        assert_eq!(s.dist(3), 10);
        assert_eq!(s.dist(2), INF_DUR, "stale distance must not leak");
    }

    #[test]
    fn settling_order_is_deterministic_on_ties() {
        let mut g = TransferGraph::new(4);
        g.add_edge(0, 2, 5);
        g.add_edge(0, 1, 5);
        g.add_edge(0, 3, 5);
        g.normalize();
        let mut s = Dijkstra::new(4);
        s.run(g.adjacency(), 0);
        assert_eq!(s.settled(), &[(0, 0), (1, 5), (2, 5), (3, 5)]);
    }

    #[test]
    fn closure_check_accepts_exact_direct_edges_only() {
        let stops = |n: u32| {
            (0..n)
                .map(|i| Stop { id: format!("S{i}"), vertex: i, buffer: 0 })
                .collect::<Vec<_>>()
        };

        // Chain 0→1→2 without the 0→2 edge: not closed.
        let mut g = TransferGraph::new(3);
        g.add_edge(0, 1, 10);
        g.add_edge(1, 2, 10);
        let net = Network::build(stops(3), vec![], g.clone(), false);
        assert!(!check_stop_closure(&net));

        // Adding 0→2 with the exact shortest weight closes it.
        g.add_edge(0, 2, 20);
        let net = Network::build(stops(3), vec![], g.clone(), false);
        assert!(check_stop_closure(&net));

        // A heavier direct edge does not count as closure.
        let mut g = TransferGraph::new(3);
        g.add_edge(0, 1, 10);
        g.add_edge(1, 2, 10);
        g.add_edge(0, 2, 25);
        let net = Network::build(stops(3), vec![], g, false);
        assert!(!check_stop_closure(&net));

        // No walk paths at all: vacuously closed.
        let net = Network::build(stops(3), vec![], TransferGraph::new(3), false);
        assert!(check_stop_closure(&net));
    }
}
