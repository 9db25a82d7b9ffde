use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gpsearch_core::analytic::{peak_width, runtime, spectrum, success_probability};
use gpsearch_core::resources::{kappa_grid, optimize_kappa};
use gpsearch_core::{make_params, Coupling};

fn closed_forms(c: &mut Criterion) {
    let p = make_params(1 << 20, 1, Coupling::Raw(1.0), 0.1).unwrap();
    let t_star = runtime(&p).unwrap();

    c.bench_function("success_probability", |b| {
        b.iter(|| success_probability(black_box(&p), black_box(0.37 * t_star)))
    });
    c.bench_function("peak_width", |b| {
        b.iter(|| peak_width(black_box(&p)).unwrap())
    });
    c.bench_function("spectrum", |b| {
        b.iter(|| spectrum(black_box(&p), black_box(1e-6), black_box(0.2)).unwrap())
    });

    let grid = kappa_grid(-1.0, 0.0, 0.01).unwrap();
    c.bench_function("optimize_kappa_2^40", |b| {
        b.iter(|| optimize_kappa(black_box(1 << 40), 0.0, &grid, 0.1, 1.0).unwrap())
    });
}

criterion_group!(benches, closed_forms);
criterion_main!(benches);
