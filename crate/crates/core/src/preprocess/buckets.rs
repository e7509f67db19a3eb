//! Bucket-based batched distance queries on a full contraction hierarchy.
//!
//! For a fixed target set, each target runs one backward (downward) search
//! and deposits `(target, distance)` entries at every settled vertex. A
//! one-to-many query is then a single upward search from the source that
//! combines its settled distances with the buckets it touches. The mirrored
//! construction (forward searches from a fixed source set over upward edges)
//! answers many-to-one queries with a single downward search from the
//! target.

use crate::model::{Network, Vertex};
use crate::preprocess::hierarchy::{build_ch, ChData};
use crate::time::{dur_add, INF_DUR};
use crate::walk::Dijkstra;

/// Bucket entries for a fixed vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Buckets {
    /// The fixed endpoint set, in index order used by query outputs.
    pub targets: Vec<Vertex>,
    /// Per vertex: `(endpoint index, hierarchy distance)`, ascending by
    /// endpoint index.
    pub entries: Vec<Vec<(u32, u32)>>,
}

/// Buckets answering one-to-many queries *into* `targets`: one backward
/// downward search per target.
pub fn build_buckets(ch: &ChData, targets: &[Vertex]) -> Buckets {
    build_with(ch, &ch.down, targets)
}

/// Buckets answering many-to-one queries *from* `sources`: one forward
/// upward search per source.
pub fn build_reverse_buckets(ch: &ChData, sources: &[Vertex]) -> Buckets {
    build_with(ch, &ch.up, sources)
}

fn build_with(ch: &ChData, edges: &[Vec<(Vertex, u32)>], endpoints: &[Vertex]) -> Buckets {
    let n = ch.vertex_count();
    let mut entries = vec![Vec::new(); n];
    let mut search = Dijkstra::new(n);
    for (i, &e) in endpoints.iter().enumerate() {
        search.run(edges, e);
        for &(v, d) in search.settled() {
            entries[v as usize].push((i as u32, d));
        }
    }
    Buckets { targets: endpoints.to_vec(), entries }
}

/// Distances from `source` to every bucket endpoint, indexed like
/// `buckets.targets`.
pub fn bucket_one_to_many(ch: &ChData, buckets: &Buckets, source: Vertex) -> Vec<u32> {
    let mut out = Vec::new();
    bucket_one_to_many_into(ch, buckets, source, &mut Dijkstra::new(ch.vertex_count()), &mut out);
    out
}

/// [`bucket_one_to_many`] with caller-owned scratch for hot paths.
pub fn bucket_one_to_many_into(
    ch: &ChData,
    buckets: &Buckets,
    source: Vertex,
    search: &mut Dijkstra,
    out: &mut Vec<u32>,
) {
    search.run(&ch.up, source);
    combine(buckets, search, out);
}

/// Distances from every bucket endpoint to `target`; `buckets` must come
/// from [`build_reverse_buckets`].
pub fn bucket_many_to_one(ch: &ChData, buckets: &Buckets, target: Vertex) -> Vec<u32> {
    let mut out = Vec::new();
    bucket_many_to_one_into(ch, buckets, target, &mut Dijkstra::new(ch.vertex_count()), &mut out);
    out
}

/// [`bucket_many_to_one`] with caller-owned scratch.
pub fn bucket_many_to_one_into(
    ch: &ChData,
    buckets: &Buckets,
    target: Vertex,
    search: &mut Dijkstra,
    out: &mut Vec<u32>,
) {
    search.run(&ch.down, target);
    combine(buckets, search, out);
}

fn combine(buckets: &Buckets, search: &Dijkstra, out: &mut Vec<u32>) {
    out.clear();
    out.resize(buckets.targets.len(), INF_DUR);
    for &(v, d) in search.settled() {
        for &(i, dt) in &buckets.entries[v as usize] {
            let total = dur_add(d, dt);
            if total < out[i as usize] {
                out[i as usize] = total;
            }
        }
    }
}

/// Full hierarchy plus buckets for a network's stop set, in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopBuckets {
    pub ch: ChData,
    /// One-to-many: arbitrary vertex → every stop.
    pub to_stops: Buckets,
    /// Many-to-one: every stop → arbitrary vertex.
    pub from_stops: Buckets,
}

impl StopBuckets {
    pub fn build(net: &Network) -> StopBuckets {
        let ch = build_ch(&net.graph, None);
        let stop_vertices: Vec<Vertex> = net.stops.iter().map(|s| s.vertex).collect();
        let to_stops = build_buckets(&ch, &stop_vertices);
        let from_stops = build_reverse_buckets(&ch, &stop_vertices);
        StopBuckets { ch, to_stops, from_stops }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TransferGraph;
    use crate::walk;

    fn ring_graph(n: u32) -> TransferGraph {
        let mut g = TransferGraph::new(n as usize);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n, 2 + v % 3);
            g.add_edge((v + 1) % n, v, 1 + v % 4);
        }
        g
    }

    #[test]
    fn one_to_many_matches_per_target_dijkstra() {
        let g = ring_graph(17);
        let ch = build_ch(&g, None);
        let targets: Vec<Vertex> = vec![0, 4, 9, 16];
        let buckets = build_buckets(&ch, &targets);
        for s in 0..17 {
            let got = bucket_one_to_many(&ch, &buckets, s);
            let plain = walk::one_to_all(&g, s);
            let want: Vec<u32> = targets.iter().map(|&t| plain[t as usize]).collect();
            assert_eq!(got, want, "source {s}");
        }
    }

    #[test]
    fn many_to_one_matches_per_source_dijkstra() {
        let g = ring_graph(13);
        let ch = build_ch(&g, None);
        let sources: Vec<Vertex> = vec![1, 5, 12];
        let buckets = build_reverse_buckets(&ch, &sources);
        for t in 0..13 {
            let got = bucket_many_to_one(&ch, &buckets, t);
            let want: Vec<u32> =
                sources.iter().map(|&s| walk::one_to_all(&g, s)[t as usize]).collect();
            assert_eq!(got, want, "target {t}");
        }
    }

    #[test]
    fn unreachable_endpoints_stay_unreachable() {
        let mut g = TransferGraph::new(4);
        g.add_edge(0, 1, 3); // 2 and 3 are isolated
        let ch = build_ch(&g, None);
        let buckets = build_buckets(&ch, &[1, 2]);
        assert_eq!(bucket_one_to_many(&ch, &buckets, 0), vec![3, INF_DUR]);
        assert_eq!(bucket_one_to_many(&ch, &buckets, 3), vec![INF_DUR, INF_DUR]);
        let rev = build_reverse_buckets(&ch, &[0, 2]);
        assert_eq!(bucket_many_to_one(&ch, &rev, 1), vec![3, INF_DUR]);
    }
}
