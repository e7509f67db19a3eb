//! Preprocessing costs on the shared benchmark network: full hierarchy,
//! core hierarchy, per-stop buckets and domination filtering.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use tad_bench::buffered_network;
use tad_core::preprocess::{build_ch, CoreChData, FilteredBoards, StopBuckets, DEFAULT_CORE_DEGREE};

fn preprocess_benches(c: &mut Criterion) {
    let net = buffered_network();
    let mut group = c.benchmark_group("preprocess");
    group.sample_size(20);
    group.bench_function("ch", |b| b.iter(|| black_box(build_ch(&net.graph, None))));
    group.bench_function("core-ch", |b| {
        b.iter(|| black_box(CoreChData::build_for(&net, DEFAULT_CORE_DEGREE)))
    });
    group.bench_function("buckets", |b| b.iter(|| black_box(StopBuckets::build(&net))));
    group.bench_function("filter", |b| b.iter(|| black_box(FilteredBoards::build(&net))));
    group.finish();
}

criterion_group!(benches, preprocess_benches);
criterion_main!(benches);
