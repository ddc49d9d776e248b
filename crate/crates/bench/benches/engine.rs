use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_rational::Ratio;

use defmatch::coverage::{match_with_defect, CoverageOptions, Variant};
use defmatch::matching::eliminate;
use defmatch::semigroup::{find_embedding, SearchBounds};
use defmatch_bench::{doubling_workload, regular_workload};

fn elimination(c: &mut Criterion) {
    let mut group = c.benchmark_group("eliminate");
    for s in [20u64, 80, 200] {
        let (g, m) = regular_workload(1, s, 3);
        group.bench_with_input(BenchmarkId::from_parameter(s), &s, |b, _| b.iter(|| eliminate(black_box(&g), &m, 2).unwrap()));
    }
    group.finish();
}

fn coverage(c: &mut Criterion) {
    let (g, _) = regular_workload(2, 60, 2);
    c.bench_function("match_with_defect/k2_m2", |b| {
        b.iter(|| match_with_defect(black_box(&g), Ratio::from_integer(2), Variant::BothSides, CoverageOptions::default()).unwrap())
    });
}

fn embedding(c: &mut Criterion) {
    let (u, x, y) = doubling_workload();
    c.bench_function("find_embedding/naturals_into_evens", |b| {
        b.iter(|| find_embedding(black_box(&u), &x, &y, &SearchBounds::default()).unwrap())
    });
}

criterion_group!(benches, elimination, coverage, embedding);
criterion_main!(benches);
