use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mathieu_core::special::{airy, bessel_j_batch, hankel1};
use mathieu_core::*;

fn special(c: &mut Criterion) {
    c.bench_function("bessel_j_batch p<=60 x=12.5", |b| b.iter(|| bessel_j_batch(60, black_box(12.5)).unwrap()));
    c.bench_function("hankel1 n=7 x=3.1", |b| b.iter(|| hankel1(7, black_box(3.1)).unwrap()));
    c.bench_function("airy x=-6.3", |b| b.iter(|| airy(black_box(-6.3)).unwrap()));
}

fn tables(c: &mut Criterion) {
    c.bench_function("build_tables theta=pi^2 nmax=60", |b| b.iter(|| build_tables(black_box(PI * PI), 60, 180).unwrap()));
}

fn radial(c: &mut Criterion) {
    let t = build_tables(PI * PI, 60, 180).unwrap();
    let series = EvaluatorConfig { n0: 100_000, ..EvaluatorConfig::default() };
    let ev_series = Evaluator::new(&t, series).unwrap();
    let ev = Evaluator::new(&t, EvaluatorConfig::default()).unwrap();
    let mut g = c.benchmark_group("radial n=30 u=1.2");
    g.bench_function("series", |b| b.iter(|| ev_series.evaluate(SymmetryClass::Even, 30, black_box(1.2)).unwrap()));
    g.bench_function("dispatched", |b| b.iter(|| ev.evaluate(SymmetryClass::Even, 30, black_box(1.2)).unwrap()));
    g.finish();
}

fn green(c: &mut Criterion) {
    let t = build_tables(PI * PI, 60, 180).unwrap();
    let pr = GreenProblem::from_a_over_lambda(Geometry::Slit, BoundaryCondition::Neumann, 2.0, 1.0, 3.0).unwrap();
    let solver = GreenSolver::new(pr, &t, EvaluatorConfig::default()).unwrap();
    let pts = scattering::window_points([-5.0, 5.0, -5.0, 5.0], 21, 21).unwrap();
    let mut g = c.benchmark_group("green");
    g.sample_size(10);
    g.bench_function("slit neumann 21x21", |b| b.iter(|| solver.grid(black_box(&pts)).unwrap()));
    g.finish();
}

criterion_group!(benches, special, tables, radial, green);
criterion_main!(benches);
