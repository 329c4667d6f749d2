use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optrate_bench::isotropic_dataset;
use optrate_core::estimators::{l1_constrained_erm, least_squares_minnorm, near_erm_family, SpectralRidge};
use std::hint::black_box;

fn minnorm(c: &mut Criterion) {
    let mut g = c.benchmark_group("least_squares_minnorm");
    for (n, d) in [(256, 128), (256, 512), (1024, 512)] {
        let data = isotropic_dataset(n, d, 1);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{n}x{d}")), &data, |b, data| {
            b.iter(|| least_squares_minnorm(black_box(data)).unwrap())
        });
    }
    g.finish();
}

fn ridge(c: &mut Criterion) {
    let data = isotropic_dataset(200, 400, 2);
    c.bench_function("spectral_ridge_setup_200x400", |b| b.iter(|| SpectralRidge::new(black_box(&data)).unwrap()));
    let sr = SpectralRidge::new(&data).unwrap();
    c.bench_function("spectral_ridge_path_41", |b| {
        b.iter(|| (0..41).map(|i| sr.train_loss(10f64.powf(-8.0 + 0.25 * i as f64))).sum::<f64>())
    });
}

fn lasso(c: &mut Criterion) {
    let mut g = c.benchmark_group("l1_constrained_erm");
    g.sample_size(20);
    let data = isotropic_dataset(100, 200, 3);
    g.bench_function("100x200", |b| b.iter(|| l1_constrained_erm(black_box(&data), 1.0).unwrap()));
    g.finish();
}

fn near_erm(c: &mut Criterion) {
    let mut g = c.benchmark_group("near_erm_family");
    g.sample_size(10);
    let data = isotropic_dataset(512, 256, 4);
    g.bench_function("512x256", |b| b.iter(|| near_erm_family(black_box(&data), 1.0).unwrap()));
    g.finish();
}

criterion_group!(benches, minnorm, ridge, lasso, near_erm);
criterion_main!(benches);
