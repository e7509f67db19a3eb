//! Query-time comparison of the engines and transfer modes on one shared
//! network and query set. Each iteration answers the next query from a
//! rotating set, so no engine benefits from answering one memorized query.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use tad_bench::{buffered_network, query_set, zero_buffer_network};
use tad_core::engines::{CsaEngine, MrEngine, TadEngine, TdEngine};
use tad_core::preprocess::{CoreChData, FilteredBoards, StopBuckets, DEFAULT_CORE_DEGREE};

fn query_benches(c: &mut Criterion) {
    let net = buffered_network();
    let core = CoreChData::build_for(&net, DEFAULT_CORE_DEGREE);
    let buckets = StopBuckets::build(&net);
    let queries = query_set(&net, 256);

    let mut group = c.benchmark_group("query");
    let mut cursor = 0usize;
    let mut next = || {
        cursor = (cursor + 1) % queries.len();
        queries[cursor]
    };

    let mut tad = TadEngine::new(&net);
    group.bench_function("tad/plain", |b| b.iter(|| black_box(tad.query(&next()).unwrap().arrival)));
    let mut tad_core = TadEngine::with_core_ch(&net, &core).unwrap();
    group.bench_function("tad/core-ch", |b| {
        b.iter(|| black_box(tad_core.query(&next()).unwrap().arrival))
    });
    let mut tad_bucket = TadEngine::with_buckets(&net, &buckets).unwrap();
    group.bench_function("tad/bucket-ch", |b| {
        b.iter(|| black_box(tad_bucket.query(&next()).unwrap().arrival))
    });
    let mut mr = MrEngine::new(&net, &core).unwrap();
    group.bench_function("mr/core-ch", |b| b.iter(|| black_box(mr.query(&next()).unwrap().arrival)));
    let mut csa = CsaEngine::new(&net).unwrap();
    group.bench_function("csa", |b| b.iter(|| black_box(csa.query(&next()).unwrap().arrival)));
    group.finish();

    // td is only honest on a buffer-free network; time it against tad there.
    let net0 = zero_buffer_network();
    let filtered = FilteredBoards::build(&net0);
    let queries0 = query_set(&net0, 256);
    let mut group = c.benchmark_group("query-zero-buffer");
    let mut cursor = 0usize;
    let mut next0 = || {
        cursor = (cursor + 1) % queries0.len();
        queries0[cursor]
    };
    let mut td = TdEngine::new(&net0, &filtered).unwrap();
    group.bench_function("td/plain", |b| b.iter(|| black_box(td.query(&next0()).unwrap().arrival)));
    let mut tad0 = TadEngine::new(&net0);
    group.bench_function("tad/plain", |b| b.iter(|| black_box(tad0.query(&next0()).unwrap().arrival)));
    group.finish();
}

criterion_group!(benches, query_benches);
criterion_main!(benches);
