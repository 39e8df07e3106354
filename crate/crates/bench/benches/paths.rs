use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use reactive_paths::path::{sample_exit_conditioned_htransform, simulate_path};
use reactive_paths::{GridSpec, SimRng, WallModel1D};

fn unconditioned_path(c: &mut Criterion) {
    let model = WallModel1D::new(1.0, 0.35, -0.25, -1.0, 0.5).unwrap();
    let grid = GridSpec::default();
    let mut rng = SimRng::new(4, 0);
    c.bench_function("simulate_path eps=0.35", |b| {
        b.iter(|| simulate_path(black_box(&model), &grid, &mut rng))
    });
}

fn htransform_exit(c: &mut Criterion) {
    let model = WallModel1D::new(1.0, 0.25, -0.25, -1.0, 0.5).unwrap();
    let mut rng = SimRng::new(5, 0);
    c.bench_function("htransform exit eps=0.25 dt=1e-3", |b| {
        b.iter(|| sample_exit_conditioned_htransform(black_box(&model), 1e-3, &mut rng))
    });
}

criterion_group!(benches, unconditioned_path, htransform_exit);
criterion_main!(benches);
