use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fpqs_core::experiments::figure4_data;
use fpqs_core::{
    run_deferred_measurement, run_fixed_point_exact, run_fixed_point_full_exact,
    run_fixed_point_sampled, run_phase_pi3, DatabaseSpec, SearchConfig,
};

fn reduced(c: &mut Criterion) {
    let cfg = SearchConfig::new(0.7, 8);
    c.bench_function("exact branch tree q=8", |b| {
        b.iter(|| run_fixed_point_exact(black_box(&cfg)).unwrap())
    });
    let cfg = SearchConfig::new(0.7, 10);
    c.bench_function("deferred circuit q=10", |b| {
        b.iter(|| run_deferred_measurement(black_box(&cfg)).unwrap())
    });
    let cfg = SearchConfig::new(0.5, 4).with_seed(1);
    c.bench_function("sampled 1e4 trials q=4", |b| {
        b.iter(|| run_fixed_point_sampled(black_box(&cfg), 10_000).unwrap())
    });
    c.bench_function("phase pi/3 level 4", |b| {
        b.iter(|| run_phase_pi3(black_box(0.3), 4).unwrap())
    });
}

fn database(c: &mut Criterion) {
    let spec = DatabaseSpec::random(1024, 37, 5).unwrap();
    c.bench_function("database N=1024 q=4", |b| {
        b.iter(|| run_fixed_point_full_exact(black_box(&spec), 4, 0.5).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(20);
    group.bench_function("figure4 step 0.01", |b| {
        b.iter(|| figure4_data(black_box(0.01), 4).unwrap())
    });
    group.finish();
}

criterion_group!(benches, reduced, database, sweeps);
criterion_main!(benches);
