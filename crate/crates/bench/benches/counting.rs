use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use threefree::{
    count_by_enumeration, count_layered, count_memoized, LayeredOptions, PlacementMask,
};

/// Odds (built from a solution for `ceil(n/2)`) then evens: 3-free.
fn odd_even(n: usize) -> Vec<usize> {
    if n <= 1 {
        return vec![1; n];
    }
    let odds = odd_even(n.div_ceil(2)).into_iter().map(|x| 2 * x - 1);
    let evens = odd_even(n / 2).into_iter().map(|x| 2 * x);
    odds.chain(evens).collect()
}

/// A reachable state: the first half of [`odd_even`] placed.
fn half_placed(n: usize) -> PlacementMask {
    odd_even(n)[..n / 2]
        .iter()
        .fold(PlacementMask::full(n).unwrap(), |m, &j| m.place(j))
}

fn legality(c: &mut Criterion) {
    let mut group = c.benchmark_group("allowed_placements");
    for n in [16usize, 64, 127] {
        let mask = half_placed(n);
        group.bench_with_input(BenchmarkId::new("bit_parallel", n), &mask, |b, m| {
            b.iter(|| black_box(m).allowed_placements())
        });
        group.bench_with_input(BenchmarkId::new("offset_loop", n), &mask, |b, m| {
            b.iter(|| black_box(m).allowed_placements_by_offsets())
        });
    }
    group.finish();
}

fn engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    for n in [20usize, 26, 30] {
        group.bench_with_input(BenchmarkId::new("memoized", n), &n, |b, &n| {
            b.iter(|| count_memoized(n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("layered", n), &n, |b, &n| {
            b.iter(|| count_layered(n, &LayeredOptions::default()).unwrap())
        });
        let sym = LayeredOptions {
            symmetry: true,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("layered_symmetry", n), &n, |b, &n| {
            b.iter(|| count_layered(n, &sym).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumeration");
    group.sample_size(10);
    for n in [10usize, 12, 14] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| count_by_enumeration(n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, legality, engines, enumeration);
criterion_main!(benches);
