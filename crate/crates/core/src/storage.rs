//! Binary persistence for networks and preprocessing artefacts.
//!
//! Each artefact is a little-endian stream starting with an 8-byte magic and
//! a format version. Networks store only their primary data (stops, trips,
//! transfer graph, closure flag); derived structures such as departure
//! boards and routes are rebuilt on load, which keeps files small and the
//! loader honest. Hierarchies and bucket sets are stored verbatim since
//! rebuilding them is the expensive step they exist to avoid.

use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use crate::model::{Network, Stop, StopEvent, TransferGraph, Trip, Vertex};
use crate::preprocess::buckets::{Buckets, StopBuckets};
use crate::preprocess::hierarchy::{ChData, CoreChData};
use crate::time::Time;

const MAGIC_NETWORK: &[u8; 8] = b"TADNET\0\0";
const MAGIC_CH: &[u8; 8] = b"TADCH\0\0\0";
const MAGIC_CORE: &[u8; 8] = b"TADCORE\0";
const MAGIC_BUCKETS: &[u8; 8] = b"TADBKT\0\0";
const VERSION: u32 = 1;

/// Upper bound on any single stored collection; a length above this is
/// treated as corruption instead of being allocated.
const MAX_LEN: u32 = 100_000_000;

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: &'static str, found: [u8; 8] },
    #[error("unsupported format version {found} (expected {VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("corrupt data: {0}")]
    Corrupt(String),
}

fn corrupt(what: impl Into<String>) -> StorageError {
    StorageError::Corrupt(what.into())
}

// ---------------------------------------------------------------------------
// Primitive readers and writers
// ---------------------------------------------------------------------------

fn write_header(w: &mut impl Write, magic: &[u8; 8]) -> Result<(), StorageError> {
    w.write_all(magic)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    Ok(())
}

fn read_header(r: &mut impl Read, magic: &'static [u8; 8]) -> Result<(), StorageError> {
    let mut found = [0u8; 8];
    r.read_exact(&mut found)?;
    if &found != magic {
        return Err(StorageError::BadMagic {
            expected: std::str::from_utf8(magic).unwrap_or("?").trim_end_matches('\0'),
            found,
        });
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(StorageError::UnsupportedVersion { found: version });
    }
    Ok(())
}

fn write_len(w: &mut impl Write, len: usize) -> Result<(), StorageError> {
    let len = u32::try_from(len).map_err(|_| corrupt("collection too large to store"))?;
    w.write_u32::<LittleEndian>(len)?;
    Ok(())
}

fn read_len(r: &mut impl Read, what: &str) -> Result<usize, StorageError> {
    let len = r.read_u32::<LittleEndian>()?;
    if len > MAX_LEN {
        return Err(corrupt(format!("{what} length {len} exceeds sanity bound")));
    }
    Ok(len as usize)
}

fn write_string(w: &mut impl Write, s: &str) -> Result<(), StorageError> {
    write_len(w, s.len())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_string(r: &mut impl Read, what: &str) -> Result<String, StorageError> {
    let len = read_len(r, what)?;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| corrupt(format!("{what} is not valid utf-8")))
}

fn write_u32_slice(w: &mut impl Write, xs: &[u32]) -> Result<(), StorageError> {
    write_len(w, xs.len())?;
    for &x in xs {
        w.write_u32::<LittleEndian>(x)?;
    }
    Ok(())
}

fn read_u32_vec(r: &mut impl Read, what: &str) -> Result<Vec<u32>, StorageError> {
    let len = read_len(r, what)?;
    let mut xs = Vec::with_capacity(len);
    for _ in 0..len {
        xs.push(r.read_u32::<LittleEndian>()?);
    }
    Ok(xs)
}

fn write_pair_lists(w: &mut impl Write, lists: &[Vec<(u32, u32)>]) -> Result<(), StorageError> {
    write_len(w, lists.len())?;
    for list in lists {
        write_len(w, list.len())?;
        for &(a, b) in list {
            w.write_u32::<LittleEndian>(a)?;
            w.write_u32::<LittleEndian>(b)?;
        }
    }
    Ok(())
}

fn read_pair_lists(r: &mut impl Read, what: &str) -> Result<Vec<Vec<(u32, u32)>>, StorageError> {
    let outer = read_len(r, what)?;
    let mut lists = Vec::with_capacity(outer);
    for _ in 0..outer {
        let inner = read_len(r, what)?;
        let mut list = Vec::with_capacity(inner);
        for _ in 0..inner {
            let a = r.read_u32::<LittleEndian>()?;
            let b = r.read_u32::<LittleEndian>()?;
            list.push((a, b));
        }
        lists.push(list);
    }
    Ok(lists)
}

fn write_graph(w: &mut impl Write, graph: &TransferGraph) -> Result<(), StorageError> {
    write_len(w, graph.vertex_count())?;
    for u in 0..graph.vertex_count() as Vertex {
        let edges = graph.edges(u);
        write_len(w, edges.len())?;
        for &(v, weight) in edges {
            w.write_u32::<LittleEndian>(v)?;
            w.write_u32::<LittleEndian>(weight)?;
        }
    }
    Ok(())
}

fn read_graph(r: &mut impl Read) -> Result<TransferGraph, StorageError> {
    let n = read_len(r, "graph vertex list")?;
    let mut graph = TransferGraph::new(n);
    for u in 0..n as Vertex {
        let deg = read_len(r, "adjacency list")?;
        for _ in 0..deg {
            let v = r.read_u32::<LittleEndian>()?;
            let weight = r.read_u32::<LittleEndian>()?;
            if v as usize >= n {
                return Err(corrupt(format!("edge target {v} out of range ({n} vertices)")));
            }
            graph.add_edge(u, v, weight);
        }
    }
    graph.normalize();
    Ok(graph)
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

pub fn save_network(net: &Network, w: &mut impl Write) -> Result<(), StorageError> {
    write_header(w, MAGIC_NETWORK)?;
    write_len(w, net.stops.len())?;
    for stop in &net.stops {
        write_string(w, &stop.id)?;
        w.write_u32::<LittleEndian>(stop.vertex)?;
        w.write_u32::<LittleEndian>(stop.buffer)?;
    }
    write_len(w, net.trips.len())?;
    for trip in &net.trips {
        write_string(w, &trip.id)?;
        write_string(w, &trip.route)?;
        write_len(w, trip.events.len())?;
        for ev in &trip.events {
            w.write_u32::<LittleEndian>(ev.stop)?;
            w.write_u32::<LittleEndian>(ev.arrival.seconds())?;
            w.write_u32::<LittleEndian>(ev.departure.seconds())?;
        }
    }
    write_graph(w, &net.graph)?;
    w.write_u8(net.stop_footpaths_closed as u8)?;
    Ok(())
}

pub fn load_network(r: &mut impl Read) -> Result<Network, StorageError> {
    read_header(r, MAGIC_NETWORK)?;
    let stop_count = read_len(r, "stop list")?;
    let mut stops = Vec::with_capacity(stop_count);
    for _ in 0..stop_count {
        let id = read_string(r, "stop id")?;
        let vertex = r.read_u32::<LittleEndian>()?;
        let buffer = r.read_u32::<LittleEndian>()?;
        stops.push(Stop { id, vertex, buffer });
    }
    let trip_count = read_len(r, "trip list")?;
    let mut trips = Vec::with_capacity(trip_count);
    for _ in 0..trip_count {
        let id = read_string(r, "trip id")?;
        let route = read_string(r, "route id")?;
        let event_count = read_len(r, "event list")?;
        let mut events = Vec::with_capacity(event_count);
        for _ in 0..event_count {
            let stop = r.read_u32::<LittleEndian>()?;
            if stop as usize >= stop_count {
                return Err(corrupt(format!("event stop {stop} out of range ({stop_count} stops)")));
            }
            let arrival = Time::from_seconds(r.read_u32::<LittleEndian>()?);
            let departure = Time::from_seconds(r.read_u32::<LittleEndian>()?);
            events.push(StopEvent { stop, arrival, departure });
        }
        trips.push(Trip { id, route, events });
    }
    let graph = read_graph(r)?;
    for stop in &stops {
        if stop.vertex as usize >= graph.vertex_count() {
            return Err(corrupt(format!(
                "stop vertex {} out of range ({} vertices)",
                stop.vertex,
                graph.vertex_count()
            )));
        }
    }
    let closed = match r.read_u8()? {
        0 => false,
        1 => true,
        other => return Err(corrupt(format!("closure flag must be 0 or 1, found {other}"))),
    };
    Ok(Network::build(stops, trips, graph, closed))
}

// ---------------------------------------------------------------------------
// Hierarchies
// ---------------------------------------------------------------------------

fn write_ch_body(w: &mut impl Write, ch: &ChData) -> Result<(), StorageError> {
    write_u32_slice(w, &ch.rank)?;
    write_pair_lists(w, &ch.up)?;
    write_pair_lists(w, &ch.down)?;
    Ok(())
}

fn read_ch_body(r: &mut impl Read) -> Result<ChData, StorageError> {
    let rank = read_u32_vec(r, "rank table")?;
    let up = read_pair_lists(r, "upward edge lists")?;
    let down = read_pair_lists(r, "downward edge lists")?;
    if up.len() != rank.len() || down.len() != rank.len() {
        return Err(corrupt("hierarchy tables disagree on vertex count"));
    }
    let n = rank.len();
    for list in up.iter().chain(down.iter()) {
        for &(v, _) in list {
            if v as usize >= n {
                return Err(corrupt(format!("hierarchy edge target {v} out of range ({n} vertices)")));
            }
        }
    }
    Ok(ChData { rank, up, down })
}

pub fn save_ch(ch: &ChData, w: &mut impl Write) -> Result<(), StorageError> {
    write_header(w, MAGIC_CH)?;
    write_ch_body(w, ch)
}

pub fn load_ch(r: &mut impl Read) -> Result<ChData, StorageError> {
    read_header(r, MAGIC_CH)?;
    read_ch_body(r)
}

pub fn save_core_ch(core: &CoreChData, w: &mut impl Write) -> Result<(), StorageError> {
    write_header(w, MAGIC_CORE)?;
    write_u32_slice(w, &core.rank)?;
    write_pair_lists(w, &core.up)?;
    write_pair_lists(w, &core.down)?;
    write_graph(w, &core.core)?;
    Ok(())
}

pub fn load_core_ch(r: &mut impl Read) -> Result<CoreChData, StorageError> {
    read_header(r, MAGIC_CORE)?;
    let rank = read_u32_vec(r, "rank table")?;
    let up = read_pair_lists(r, "upward edge lists")?;
    let down = read_pair_lists(r, "downward edge lists")?;
    let core = read_graph(r)?;
    let n = rank.len();
    if up.len() != n || down.len() != n || core.vertex_count() != n {
        return Err(corrupt("core hierarchy tables disagree on vertex count"));
    }
    for list in up.iter().chain(down.iter()) {
        for &(v, _) in list {
            if v as usize >= n {
                return Err(corrupt(format!("hierarchy edge target {v} out of range ({n} vertices)")));
            }
        }
    }
    let is_core = rank.iter().map(|&r| r == u32::MAX).collect();
    Ok(CoreChData { rank, up, down, core, is_core })
}

// ---------------------------------------------------------------------------
// Bucket sets
// ---------------------------------------------------------------------------

fn write_bucket_set(w: &mut impl Write, b: &Buckets) -> Result<(), StorageError> {
    write_u32_slice(w, &b.targets)?;
    write_pair_lists(w, &b.entries)?;
    Ok(())
}

fn read_bucket_set(r: &mut impl Read, n: usize) -> Result<Buckets, StorageError> {
    let targets = read_u32_vec(r, "bucket target list")?;
    let entries = read_pair_lists(r, "bucket entry lists")?;
    if entries.len() != n {
        return Err(corrupt("bucket entries disagree with hierarchy vertex count"));
    }
    for &t in &targets {
        if t as usize >= n {
            return Err(corrupt(format!("bucket target {t} out of range ({n} vertices)")));
        }
    }
    let m = targets.len();
    for list in &entries {
        for &(idx, _) in list {
            if idx as usize >= m {
                return Err(corrupt(format!("bucket entry index {idx} out of range ({m} targets)")));
            }
        }
    }
    Ok(Buckets { targets, entries })
}

pub fn save_buckets(bk: &StopBuckets, w: &mut impl Write) -> Result<(), StorageError> {
    write_header(w, MAGIC_BUCKETS)?;
    write_ch_body(w, &bk.ch)?;
    write_bucket_set(w, &bk.to_stops)?;
    write_bucket_set(w, &bk.from_stops)?;
    Ok(())
}

pub fn load_buckets(r: &mut impl Read) -> Result<StopBuckets, StorageError> {
    read_header(r, MAGIC_BUCKETS)?;
    let ch = read_ch_body(r)?;
    let n = ch.vertex_count();
    let to_stops = read_bucket_set(r, n)?;
    let from_stops = read_bucket_set(r, n)?;
    Ok(StopBuckets { ch, to_stops, from_stops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{self, GenParams};
    use crate::preprocess::{build_ch, DEFAULT_CORE_DEGREE};

    fn sample_network() -> Network {
        netgen::generate(&GenParams {
            seed: 11,
            stop_count: 12,
            extra_vertex_count: 8,
            trip_count: 9,
            buffer_rate: 0.7,
            ..GenParams::default()
        })
        .unwrap()
    }

    #[test]
    fn network_round_trips() {
        let net = sample_network();
        let mut buf = Vec::new();
        save_network(&net, &mut buf).unwrap();
        let loaded = load_network(&mut buf.as_slice()).unwrap();
        assert_eq!(loaded.stops, net.stops);
        assert_eq!(loaded.trips, net.trips);
        assert_eq!(loaded.graph, net.graph);
        assert_eq!(loaded.stop_footpaths_closed, net.stop_footpaths_closed);
        // Derived data is rebuilt, not stored; it must come out identical.
        assert_eq!(loaded.boards, net.boards);
        assert_eq!(loaded.routes, net.routes);
    }

    #[test]
    fn hierarchy_round_trips() {
        let net = sample_network();
        let ch = build_ch(&net.graph, None);
        let mut buf = Vec::new();
        save_ch(&ch, &mut buf).unwrap();
        let loaded = load_ch(&mut buf.as_slice()).unwrap();
        assert_eq!(loaded.rank, ch.rank);
        assert_eq!(loaded.up, ch.up);
        assert_eq!(loaded.down, ch.down);
    }

    #[test]
    fn core_hierarchy_round_trips() {
        let net = sample_network();
        let core = crate::preprocess::hierarchy::CoreChData::build_for(&net, DEFAULT_CORE_DEGREE);
        let mut buf = Vec::new();
        save_core_ch(&core, &mut buf).unwrap();
        let loaded = load_core_ch(&mut buf.as_slice()).unwrap();
        assert_eq!(loaded.rank, core.rank);
        assert_eq!(loaded.up, core.up);
        assert_eq!(loaded.down, core.down);
        assert_eq!(loaded.core, core.core);
        assert_eq!(loaded.is_core, core.is_core);
    }

    #[test]
    fn bucket_sets_round_trip() {
        let net = sample_network();
        let bk = StopBuckets::build(&net);
        let mut buf = Vec::new();
        save_buckets(&bk, &mut buf).unwrap();
        let loaded = load_buckets(&mut buf.as_slice()).unwrap();
        assert_eq!(loaded.ch.rank, bk.ch.rank);
        assert_eq!(loaded.to_stops.targets, bk.to_stops.targets);
        assert_eq!(loaded.to_stops.entries, bk.to_stops.entries);
        assert_eq!(loaded.from_stops.targets, bk.from_stops.targets);
        assert_eq!(loaded.from_stops.entries, bk.from_stops.entries);
    }

    #[test]
    fn rejects_wrong_magic_and_version() {
        let net = sample_network();
        let mut buf = Vec::new();
        save_network(&net, &mut buf).unwrap();
        assert!(matches!(load_ch(&mut buf.as_slice()), Err(StorageError::BadMagic { .. })));

        let mut tampered = buf.clone();
        tampered[8] = 99;
        assert!(matches!(
            load_network(&mut tampered.as_slice()),
            Err(StorageError::UnsupportedVersion { found: 99 })
        ));
    }

    #[test]
    fn rejects_truncation_and_garbage_lengths() {
        let net = sample_network();
        let mut buf = Vec::new();
        save_network(&net, &mut buf).unwrap();
        let cut = &buf[..buf.len() / 2];
        assert!(load_network(&mut &cut[..]).is_err());

        // An absurd stop count must fail fast instead of allocating.
        let mut huge = buf[..12].to_vec();
        huge.extend_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(load_network(&mut huge.as_slice()), Err(StorageError::Corrupt(_))));
    }
}
