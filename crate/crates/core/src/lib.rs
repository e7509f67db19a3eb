//! Journey planning on multi-modal transit networks: schedules with
//! non-FIFO trips, per-stop transfer buffers, and an unrestricted walking
//! graph.
//!
//! The crate provides:
//! * a network model ([`model`]) combining a timetable with a weighted
//!   transfer graph, plus GTFS-subset and plain-text graph I/O;
//! * preprocessing ([`preprocess`]): dominated-connection filtering,
//!   contraction hierarchies (full and core), and stop buckets;
//! * query engines ([`engines`]): a transfer-aware Dijkstra that scans whole
//!   remaining trips on boarding, a time-dependent Dijkstra over filtered
//!   connections, a connection-scan engine, and a round-based engine on the
//!   core graph — each over plain, core-hierarchy, or bucket transfers where
//!   applicable;
//! * reference oracles ([`oracle`]) and a seeded network generator
//!   ([`netgen`]) for randomized cross-checking;
//! * binary serialization ([`storage`]) for networks and preprocessing
//!   artifacts.
//!
//! Times are integer seconds since service midnight and may exceed 24h;
//! `u32::MAX` is the unreachable sentinel throughout.

pub mod engines;
pub mod model;
pub mod netgen;
pub mod oracle;
pub mod preprocess;
pub mod storage;
pub mod time;
pub mod walk;

pub use model::{Network, Stop, StopEvent, TransferGraph, Trip, Vertex};
pub use time::Time;
