//! Contraction hierarchies over the transfer graph.
//!
//! Vertices are contracted one at a time in priority order (edge difference
//! plus contracted-neighbor count, lazily re-evaluated, ties by vertex
//! index). Contracting `v` inserts a shortcut `u → w` for every in/out
//! neighbor pair whose shortest connection runs through `v`; a bounded
//! witness search checks whether a bypass at most as long already exists.
//! Abandoning a witness search early only ever inserts redundant shortcuts,
//! never wrong distances.
//!
//! Two variants share the machinery:
//! * full hierarchies ([`build_ch`]) contract everything and answer
//!   point-to-point queries via upward/downward searches;
//! * core hierarchies ([`build_core_ch`]) never contract protected (stop)
//!   vertices and stop early once the remaining graph gets dense, leaving a
//!   distance-preserving core graph for transit search plus a partial
//!   hierarchy for initial/final walking legs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::model::{Network, TransferGraph, Vertex};
use crate::time::{dur_add, INF_DUR};
use crate::walk::Dijkstra;

/// Settled-vertex budget per witness search; beyond it the shortcut is
/// inserted unconditionally.
const WITNESS_SETTLE_CAP: usize = 500;

/// Core-graph density at which core contraction stops, as average directed
/// degree. The value is a conventional default, exposed as a knob.
pub const DEFAULT_CORE_DEGREE: f64 = 14.0;

/// A full contraction hierarchy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChData {
    /// Contraction order position per vertex (0 = contracted first). In a
    /// full hierarchy every rank is finite; partial hierarchies mark
    /// uncontracted vertices with `u32::MAX`.
    pub rank: Vec<u32>,
    /// `up[u]`: edges `u → v` (original + shortcuts) with `rank[v] > rank[u]`.
    pub up: Vec<Vec<(Vertex, u32)>>,
    /// `down[v]`: edges `u → v` with `rank[u] > rank[v]`, stored at `v` so the
    /// backward search can traverse them against their direction.
    pub down: Vec<Vec<(Vertex, u32)>>,
}

impl ChData {
    pub fn vertex_count(&self) -> usize {
        self.rank.len()
    }
}

/// A core hierarchy: partial CH over contracted vertices plus the remaining
/// core graph, which preserves all pairwise distances between core vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreChData {
    /// Contraction ranks; core vertices keep `u32::MAX`.
    pub rank: Vec<u32>,
    pub up: Vec<Vec<(Vertex, u32)>>,
    pub down: Vec<Vec<(Vertex, u32)>>,
    /// Distance-preserving graph over the uncontracted core.
    pub core: TransferGraph,
    pub is_core: Vec<bool>,
}

impl CoreChData {
    pub fn vertex_count(&self) -> usize {
        self.rank.len()
    }

    /// Number of vertices that were never contracted.
    pub fn core_vertex_count(&self) -> usize {
        self.is_core.iter().filter(|&&c| c).count()
    }

    /// Builds a core hierarchy for a network with its stop vertices
    /// protected.
    pub fn build_for(net: &Network, max_avg_core_degree: f64) -> CoreChData {
        let protected: Vec<Vertex> = net.stops.iter().map(|s| s.vertex).collect();
        build_core_ch(&net.graph, &protected, max_avg_core_degree)
    }
}

/// Builds a full contraction hierarchy.
///
/// `avg_degree_limit`, when set, is a density guard for the late phase of
/// contraction: once the remaining graph's average directed degree exceeds
/// it, witness searches run unbounded (exact) so that only genuinely
/// necessary shortcuts are added from then on. Correctness is identical
/// either way.
pub fn build_ch(graph: &TransferGraph, avg_degree_limit: Option<f64>) -> ChData {
    let mut contractor = Contractor::new(graph, &[]);
    contractor.run(None, avg_degree_limit);
    let (rank, up, down, _) = contractor.finish();
    ChData { rank, up, down }
}

/// Builds a core hierarchy: contraction skips `protected` vertices entirely
/// and halts once only protected vertices remain or the average core degree
/// exceeds `max_avg_core_degree` (checked before each contraction).
pub fn build_core_ch(
    graph: &TransferGraph,
    protected: &[Vertex],
    max_avg_core_degree: f64,
) -> CoreChData {
    let mut contractor = Contractor::new(graph, protected);
    contractor.run(Some(max_avg_core_degree), None);
    let (rank, up, down, core) = contractor.finish();
    let is_core = rank.iter().map(|&r| r == u32::MAX).collect();
    CoreChData { rank, up, down, core, is_core }
}

/// Point-to-point distance on a full hierarchy: forward search over `up`
/// from `s`, backward search over `down` from `t`, best meeting vertex wins.
pub fn ch_query(ch: &ChData, s: Vertex, t: Vertex) -> u32 {
    let mut fwd = Dijkstra::new(ch.vertex_count());
    let mut bwd = Dijkstra::new(ch.vertex_count());
    ch_query_with(ch, s, t, &mut fwd, &mut bwd)
}

/// [`ch_query`] with caller-owned search scratch.
pub fn ch_query_with(
    ch: &ChData,
    s: Vertex,
    t: Vertex,
    fwd: &mut Dijkstra,
    bwd: &mut Dijkstra,
) -> u32 {
    fwd.run(&ch.up, s);
    bwd.run(&ch.down, t);
    let mut best = INF_DUR;
    for &(v, d) in fwd.settled() {
        best = best.min(dur_add(d, bwd.dist(v)));
    }
    best
}

struct Contractor {
    out: Vec<Vec<(Vertex, u32)>>,
    inn: Vec<Vec<(Vertex, u32)>>,
    contracted: Vec<bool>,
    protected: Vec<bool>,
    contracted_neighbors: Vec<u32>,
    order: Vec<Vertex>,
    remaining_vertices: usize,
    remaining_edges: usize,
    exact_witness: bool,
    // Witness-search scratch.
    dist: Vec<u32>,
    stamp: Vec<u32>,
    generation: u32,
    heap: BinaryHeap<Reverse<(u32, Vertex)>>,
}

impl Contractor {
    fn new(graph: &TransferGraph, protected: &[Vertex]) -> Contractor {
        let mut normalized = graph.clone();
        normalized.normalize();
        let n = normalized.vertex_count();
        let mut protected_flags = vec![false; n];
        for &v in protected {
            protected_flags[v as usize] = true;
        }
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut edges = 0;
        for u in 0..n as Vertex {
            for &(v, w) in normalized.edges(u) {
                out[u as usize].push((v, w));
                inn[v as usize].push((u, w));
                edges += 1;
            }
        }
        Contractor {
            out,
            inn,
            contracted: vec![false; n],
            protected: protected_flags,
            contracted_neighbors: vec![0; n],
            order: Vec::new(),
            remaining_vertices: n,
            remaining_edges: edges,
            exact_witness: false,
            dist: vec![INF_DUR; n],
            stamp: vec![0; n],
            generation: 0,
            heap: BinaryHeap::new(),
        }
    }

    fn avg_degree(&self) -> f64 {
        if self.remaining_vertices == 0 {
            0.0
        } else {
            self.remaining_edges as f64 / self.remaining_vertices as f64
        }
    }

    /// Contracts until done, the core-degree threshold trips, or only
    /// protected vertices remain.
    fn run(&mut self, stop_above_degree: Option<f64>, exact_witness_above: Option<f64>) {
        let n = self.contracted.len();
        let mut queue: BinaryHeap<Reverse<(i64, Vertex)>> = BinaryHeap::new();
        for v in 0..n as Vertex {
            if !self.protected[v as usize] {
                let p = self.priority(v);
                queue.push(Reverse((p, v)));
            }
        }

        loop {
            if let Some(limit) = stop_above_degree {
                if self.remaining_edges > 0 && self.avg_degree() > limit {
                    break;
                }
            }
            if let Some(limit) = exact_witness_above {
                if !self.exact_witness && self.avg_degree() > limit {
                    self.exact_witness = true;
                }
            }
            let Some(Reverse((_, v))) = queue.pop() else { break };
            if self.contracted[v as usize] {
                continue;
            }
            // Lazy priority: recompute, and defer if the vertex no longer
            // tops the queue.
            let current = self.priority(v);
            if queue.peek().is_some_and(|&Reverse((top, _))| current > top) {
                queue.push(Reverse((current, v)));
                continue;
            }
            self.contract(v);
        }
    }

    fn priority(&mut self, v: Vertex) -> i64 {
        let (added, removed) = self.shortcuts(v, false);
        added as i64 - removed as i64 + i64::from(self.contracted_neighbors[v as usize])
    }

    fn contract(&mut self, v: Vertex) {
        let (_, removed) = self.shortcuts(v, true);
        self.contracted[v as usize] = true;
        self.remaining_vertices -= 1;
        self.remaining_edges -= removed;
        self.order.push(v);

        let mut neighbors: Vec<Vertex> = self.inn[v as usize]
            .iter()
            .chain(&self.out[v as usize])
            .map(|&(x, _)| x)
            .filter(|&x| !self.contracted[x as usize])
            .collect();
        neighbors.sort_unstable();
        neighbors.dedup();
        for x in neighbors {
            self.contracted_neighbors[x as usize] += 1;
        }
    }

    /// Counts (and with `apply`, inserts) the shortcuts required to remove
    /// `v`; returns `(shortcuts, live edges removed)`.
    fn shortcuts(&mut self, v: Vertex, apply: bool) -> (usize, usize) {
        let live = |list: &[(Vertex, u32)], contracted: &[bool]| -> Vec<(Vertex, u32)> {
            list.iter().filter(|&&(x, _)| !contracted[x as usize]).copied().collect()
        };
        let in_list = live(&self.inn[v as usize], &self.contracted);
        let out_list = live(&self.out[v as usize], &self.contracted);
        let removed = in_list.len() + out_list.len();

        let mut added = 0;
        for &(u, w_uv) in &in_list {
            let bound = out_list
                .iter()
                .filter(|&&(w, _)| w != u)
                .map(|&(_, w_vw)| dur_add(w_uv, w_vw))
                .max();
            let Some(bound) = bound else { continue };
            self.witness_search(u, v, bound);
            for &(w, w_vw) in &out_list {
                if w == u {
                    continue;
                }
                let needed = dur_add(w_uv, w_vw);
                if needed == INF_DUR || self.witness_dist(w) <= needed {
                    continue;
                }
                added += 1;
                if apply {
                    self.insert_edge(u, w, needed);
                }
            }
        }
        (added, removed)
    }

    /// Bounded Dijkstra from `u` through the remaining graph, skipping `v`.
    fn witness_search(&mut self, u: Vertex, v: Vertex, bound: u32) {
        self.generation = match self.generation.checked_add(1) {
            Some(g) => g,
            None => {
                self.stamp.fill(0);
                1
            }
        };
        self.heap.clear();
        self.dist[u as usize] = 0;
        self.stamp[u as usize] = self.generation;
        self.heap.push(Reverse((0, u)));
        let cap = if self.exact_witness { usize::MAX } else { WITNESS_SETTLE_CAP };
        let mut settled = 0;
        while let Some(Reverse((d, x))) = self.heap.pop() {
            if d > self.witness_dist(x) {
                continue;
            }
            if d > bound {
                break;
            }
            settled += 1;
            if settled > cap {
                break;
            }
            for &(y, w) in &self.out[x as usize] {
                if y == v || self.contracted[y as usize] {
                    continue;
                }
                let nd = dur_add(d, w);
                if nd < self.witness_dist(y) {
                    self.dist[y as usize] = nd;
                    self.stamp[y as usize] = self.generation;
                    self.heap.push(Reverse((nd, y)));
                }
            }
        }
    }

    #[inline]
    fn witness_dist(&self, x: Vertex) -> u32 {
        if self.stamp[x as usize] == self.generation {
            self.dist[x as usize]
        } else {
            INF_DUR
        }
    }

    /// Adds `u → w` keeping the cheaper of any existing parallel edge.
    fn insert_edge(&mut self, u: Vertex, w: Vertex, weight: u32) {
        if let Some(entry) = self.out[u as usize].iter_mut().find(|e| e.0 == w) {
            if weight < entry.1 {
                entry.1 = weight;
                let back = self.inn[w as usize]
                    .iter_mut()
                    .find(|e| e.0 == u)
                    .expect("in/out adjacency out of sync");
                back.1 = weight;
            }
            return;
        }
        self.out[u as usize].push((w, weight));
        self.inn[w as usize].push((u, weight));
        self.remaining_edges += 1;
    }

    /// Splits the accumulated edge set by rank into upward and downward
    /// lists plus the core graph over uncontracted vertices.
    #[allow(clippy::type_complexity)]
    fn finish(self) -> (Vec<u32>, Vec<Vec<(Vertex, u32)>>, Vec<Vec<(Vertex, u32)>>, TransferGraph) {
        let n = self.contracted.len();
        let mut rank = vec![u32::MAX; n];
        for (pos, &v) in self.order.iter().enumerate() {
            rank[v as usize] = pos as u32;
        }
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        let mut core = TransferGraph::new(n);
        for u in 0..n {
            for &(v, w) in &self.out[u] {
                let (ru, rv) = (rank[u], rank[v as usize]);
                if ru == u32::MAX && rv == u32::MAX {
                    core.add_edge(u as Vertex, v, w);
                } else if ru < rv {
                    up[u].push((v, w));
                } else {
                    down[v as usize].push((u as Vertex, w));
                }
            }
        }
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
        }
        core.normalize();
        (rank, up, down, core)
    }
}
