use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpsearch_core::analytic::runtime;
use gpsearch_core::dynamics::{integrate_decoupled, integrate_full, integrate_reduced};
use gpsearch_core::{make_params, Coupling, GammaPolicy, IntegratorConfig, Sampler};

fn reduced(c: &mut Criterion) {
    let cfg = IntegratorConfig::default().with_sampler(Sampler::Uniform { points: 201 });
    let mut group = c.benchmark_group("reduced_to_runtime");
    for e in [10u32, 16, 20] {
        let p = make_params(1 << e, 1, Coupling::Raw(1.0), 0.1).unwrap();
        let t_star = runtime(&p).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(e), &p, |b, p| {
            b.iter(|| {
                integrate_reduced(black_box(p), &GammaPolicy::Critical, t_star, &cfg).unwrap()
            })
        });
    }
    group.finish();
}

fn decoupled(c: &mut Criterion) {
    let cfg = IntegratorConfig::default().with_sampler(Sampler::Uniform { points: 201 });
    let p = make_params(1 << 16, 1, Coupling::Raw(1.0), 0.1).unwrap();
    let t_star = runtime(&p).unwrap();
    c.bench_function("decoupled_to_runtime_2^16", |b| {
        b.iter(|| integrate_decoupled(black_box(&p), t_star, &cfg).unwrap())
    });
}

fn full(c: &mut Criterion) {
    let cfg = IntegratorConfig::default()
        .with_tolerances(1e-8, 1e-10)
        .with_sampler(Sampler::Uniform { points: 51 });
    let mut group = c.benchmark_group("full_to_runtime");
    group.sample_size(10);
    for n in [64usize, 1024] {
        let p = make_params(n, 1, Coupling::Raw(1.0), 0.1).unwrap();
        let t_star = runtime(&p).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| {
                integrate_full(black_box(p), &[0], &GammaPolicy::Critical, t_star, &cfg).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, reduced, decoupled, full);
criterion_main!(benches);
