//! Benchmarks for the hot paths: the sign sieve, Σ(I, α) counting, and
//! the exact integral.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mfo_core::oscillation::{count_sign_changes, integral_sigma, sigma};
use mfo_core::rat::rat;
use mfo_core::{sieve_signs, Interval, PrimeSignAssignment};

fn bench_sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    for limit in [100_000u64, 1_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(limit), &limit, |b, &limit| {
            b.iter(|| sieve_signs(&PrimeSignAssignment::Liouville, black_box(limit)).unwrap());
        });
    }
    g.finish();
}

fn bench_sigma(c: &mut Criterion) {
    let table = sieve_signs(&PrimeSignAssignment::Liouville, 2_000_000).unwrap();
    let alpha = rat(3, 2);
    let mut g = c.benchmark_group("sigma");
    for len in [10_000u64, 100_000, 1_000_000] {
        let i = Interval::new(1_000, 1_000 + len).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(len), &i, |b, i| {
            b.iter(|| sigma(black_box(&table), i, &alpha).unwrap());
        });
    }
    g.finish();
}

fn bench_integral(c: &mut Criterion) {
    let table = sieve_signs(&PrimeSignAssignment::Liouville, 4_096).unwrap();
    let i = Interval::new(1_000, 2_000).unwrap();
    c.bench_function("integral_sigma width 1/16", |b| {
        b.iter(|| integral_sigma(black_box(&table), &i, &rat(1, 2), &rat(9, 16)).unwrap());
    });
}

fn bench_changes(c: &mut Criterion) {
    let table = sieve_signs(&PrimeSignAssignment::Liouville, 1_000_000).unwrap();
    c.bench_function("count_sign_changes 1e6", |b| {
        b.iter(|| count_sign_changes(black_box(&table), 1_000_000).unwrap());
    });
}

criterion_group!(
    benches,
    bench_sieve,
    bench_sigma,
    bench_integral,
    bench_changes
);
criterion_main!(benches);
