use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lerw_core::rayleigh::{rayleigh_event_driven, surrogate_lengths};
use lerw_core::replicates::map_replicates_seq;
#[cfg(feature = "parallel")]
use lerw_core::replicates::map_replicates_par;

fn surrogate(c: &mut Criterion) {
    let mut group = c.benchmark_group("surrogate_chains");
    group.sample_size(20);
    for &reps in &[64usize, 512] {
        let job = |_: usize, rng: &mut _| surrogate_lengths(10_000, 2_000, rng).unwrap()[2_000];
        group.bench_with_input(BenchmarkId::new("sequential", reps), &reps, |b, &n| {
            b.iter(|| black_box(map_replicates_seq(n, 7, job)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", reps), &reps, |b, &n| {
            b.iter(|| black_box(map_replicates_par(n, 7, job)))
        });
    }
    group.finish();
}

fn rayleigh(c: &mut Criterion) {
    let mut group = c.benchmark_group("rayleigh_paths");
    group.sample_size(20);
    for &reps in &[1_000usize, 10_000] {
        let job = |_: usize, rng: &mut _| rayleigh_event_driven(0.0, 20.0, rng).unwrap().value_at(20.0);
        group.bench_with_input(BenchmarkId::new("sequential", reps), &reps, |b, &n| {
            b.iter(|| black_box(map_replicates_seq(n, 7, job)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", reps), &reps, |b, &n| {
            b.iter(|| black_box(map_replicates_par(n, 7, job)))
        });
    }
    group.finish();
}

criterion_group!(benches, surrogate, rayleigh);
criterion_main!(benches);
