//! Shared fixtures for the benchmark targets: deterministic generated
//! networks and query sets, sized so single queries stay in the
//! microsecond range criterion measures well.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tad_core::engines::QueryRequest;
use tad_core::netgen::{self, GenParams};
use tad_core::{Network, Time};

/// Mid-sized buffered network with closed stop footpaths, so every engine
/// (including csa) can run on it.
pub fn buffered_network() -> Network {
    netgen::generate(&GenParams {
        seed: 0xBE9C,
        stop_count: 120,
        extra_vertex_count: 240,
        trip_count: 200,
        trip_len: (2, 6),
        buffer_rate: 0.5,
        buffer_range: (60, 600),
        non_fifo_rate: 0.3,
        closure_mode: true,
        ..GenParams::default()
    })
    .expect("benchmark parameters are valid")
}

/// Same shape with every buffer zero: the setting where the filtered td
/// engine is sound and comparable.
pub fn zero_buffer_network() -> Network {
    netgen::generate(&GenParams {
        seed: 0xBE9C,
        stop_count: 120,
        extra_vertex_count: 240,
        trip_count: 200,
        trip_len: (2, 6),
        buffer_rate: 0.0,
        non_fifo_rate: 0.3,
        closure_mode: true,
        ..GenParams::default()
    })
    .expect("benchmark parameters are valid")
}

/// Deterministic uniform query set over all transfer-graph vertices.
pub fn query_set(net: &Network, count: usize) -> Vec<QueryRequest> {
    let n = net.graph.vertex_count() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9E2);
    (0..count)
        .map(|_| {
            QueryRequest::one_to_one(
                rng.random_range(0..n),
                rng.random_range(0..n),
                Time::from_seconds(rng.random_range(0..86_400)),
            )
        })
        .collect()
}
