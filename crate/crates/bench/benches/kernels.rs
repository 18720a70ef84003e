use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trajrot_core::scenarios::{hopf_partner, twist_polar, unit_circle_xy, Scenario, ScenarioName};
use trajrot_core::*;

fn gauss(c: &mut Criterion) {
    let mut g = c.benchmark_group("gauss_pair");
    for n in [100, 200, 400] {
        let (a, b) = (unit_circle_xy(n), hopf_partner(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| gauss_rotation_pair(black_box(&a), black_box(&b), Mode::Signed).unwrap())
        });
    }
    g.finish();
}

fn integrate(c: &mut Criterion) {
    let f = FieldSpec::spiral2d();
    let cfg = IntegratorConfig::with_tolerances(1e-8, 1e-10);
    c.bench_function("integrate_spiral_T10", |b| {
        b.iter(|| integrate_trajectory(&f, black_box(&[0.5, 0.0]), 0.0, 10.0, &cfg).unwrap())
    });
    c.bench_function("integrate_twist_polar", |b| b.iter(|| twist_polar(black_box(0.05), 0.2).unwrap()));
}

fn rotation(c: &mut Criterion) {
    let s = Scenario::new(ScenarioName::Spiral);
    let traj = s.trajectories().unwrap().remove(0);
    c.bench_function("absolute_rotation_spiral", |b| {
        b.iter(|| absolute_rotation_point(black_box(&traj), &s.point).unwrap())
    });
}

fn crofton(c: &mut Criterion) {
    let circle = SphericalCurve::new(unit_circle_xy(721)).unwrap();
    c.bench_function("crofton_10k", |b| b.iter(|| crofton_length_estimate(black_box(&circle), 10_000, 42).unwrap()));
    let loops = Curve::from_fn(0.0, 1.0, 4001, true, |t| {
        let a = 10.0 * std::f64::consts::TAU * t;
        vec![a.cos(), a.sin()]
    })
    .unwrap();
    c.bench_function("circle_witness_10_turns", |b| b.iter(|| find_circle_witness(black_box(&loops), 9.0).unwrap()));
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = gauss, integrate, rotation, crofton
}
criterion_main!(kernels);
