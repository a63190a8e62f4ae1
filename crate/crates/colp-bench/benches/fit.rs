use std::hint::black_box;

use colp_bench::scenario_sample;
use colp_core::{
    decide, fit_colp_exhaustive, fit_colp_greedy, fit_ordinal, CausalConfig, ColpConfig,
    FitConfig, Link, Permutation,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_fit_ordinal(c: &mut Criterion) {
    let data = scenario_sample(5, 1000, 11);
    let sigma = Permutation::identity(5);
    let config = FitConfig::default();
    c.bench_function("fit_ordinal L5 n1000", |b| {
        b.iter(|| fit_ordinal(black_box(&data), &sigma, Link::Logit, &config).unwrap())
    });
}

fn bench_exhaustive(c: &mut Criterion) {
    let data = scenario_sample(5, 1000, 12);
    let config = ColpConfig::default();
    c.bench_function("fit_colp_exhaustive L5 n1000", |b| {
        b.iter(|| fit_colp_exhaustive(black_box(&data), Link::Logit, &config).unwrap())
    });
}

fn bench_greedy(c: &mut Criterion) {
    let data = scenario_sample(10, 1000, 13);
    let config = ColpConfig::default();
    let init = Permutation::identity(10);
    c.bench_function("fit_colp_greedy L10 n1000", |b| {
        b.iter(|| fit_colp_greedy(black_box(&data), Link::Logit, &init, &config).unwrap())
    });
}

fn bench_decide(c: &mut Criterion) {
    let data = scenario_sample(5, 1000, 14);
    let config = CausalConfig::default();
    c.bench_function("decide L5 n1000", |b| {
        b.iter(|| decide(black_box(&data), &config).unwrap())
    });
}

fn bench_generate(c: &mut Criterion) {
    c.bench_function("generate scenario-1 n1000", |b| {
        let mut rep = 0usize;
        b.iter(|| {
            rep = rep.wrapping_add(1);
            black_box(scenario_sample(5, 1000, rep as u64))
        })
    });
}

criterion_group!(
    benches,
    bench_fit_ordinal,
    bench_exhaustive,
    bench_greedy,
    bench_decide,
    bench_generate
);
criterion_main!(benches);
