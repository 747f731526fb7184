//! Benchmarks for the main computational pipeline: the two Hodge-filtration
//! routes, the rescaling oracle, and the irregular filtration on the chart
//! at infinity.

use criterion::{criterion_group, criterion_main, Criterion};
use mhc_core::corpus;
use mhc_core::filtops::Window;
use mhc_core::fourier::{hodge_closed_formula, hodge_via_gluing, irr_hodge};
use mhc_core::infinity::{irr_infinity, Chart};
use mhc_core::rational::Rational;
use mhc_core::rescale::irr_from_oracle;
use std::hint::black_box;

fn bench_pipeline(c: &mut Criterion) {
    let w = Window::default();
    let jordan = corpus::log_unipotent();
    let nc2 = corpus::nc2();
    let alpha = Rational::from_frac(1, 2);

    c.bench_function("hodge via gluing (rank 1)", |b| {
        b.iter(|| hodge_via_gluing(black_box(&jordan), w))
    });
    c.bench_function("hodge closed formula (rank 1)", |b| {
        b.iter(|| hodge_closed_formula(black_box(&jordan), w))
    });
    c.bench_function("irregular hodge (rank 2)", |b| {
        b.iter(|| irr_hodge(black_box(&nc2), &alpha, w))
    });
    c.bench_function("rescaling oracle (rank 2)", |b| {
        b.iter(|| irr_from_oracle(black_box(&nc2), &alpha))
    });

    let chart = Chart::new(&jordan);
    let small = Window::new(-4, 4);
    c.bench_function("infinity chart irregular filtration", |b| {
        b.iter(|| irr_infinity(black_box(&chart), &Rational::zero(), small, 4))
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
