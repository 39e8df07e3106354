use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use reactive_paths::samplers::{sample_gaussian_tail, sample_r_at, sample_tau0_given_hit};
use reactive_paths::{SimRng, WallModel1D};

fn gaussian_tail(c: &mut Criterion) {
    let mut group = c.benchmark_group("gaussian_tail");
    for a in [0.2, 2.0, 20.0] {
        group.bench_with_input(BenchmarkId::from_parameter(a), &a, |b, &a| {
            let mut rng = SimRng::new(1, 0);
            b.iter(|| sample_gaussian_tail(black_box(a), &mut rng))
        });
    }
    group.finish();
}

fn residual_life(c: &mut Criterion) {
    let mut rng = SimRng::new(2, 0);
    c.bench_function("sample_r a=5", |b| {
        b.iter(|| sample_r_at(black_box(5.0), &mut rng))
    });
}

fn tau0(c: &mut Criterion) {
    let model = WallModel1D::new(1.0, 0.05, -0.5, -1.0, 0.0).unwrap();
    let mut rng = SimRng::new(3, 0);
    c.bench_function("tau0 given hit eps=0.05", |b| {
        b.iter(|| sample_tau0_given_hit(black_box(&model), &mut rng))
    });
}

criterion_group!(benches, gaussian_tail, residual_life, tau0);
criterion_main!(benches);
