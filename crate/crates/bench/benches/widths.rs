use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use optrate_bench::sparse_wstar;
use optrate_core::bounds::{psi_minimize, Sign, SummaryFunctional};
use optrate_core::widths::{
    l1_descent_cone_dimension, statistical_dimension_psi, width_ball, ConstraintSet, FullSpaceWidth, IsotropicBallWidth,
};
use optrate_core::CovarianceSpec;

fn widths(c: &mut Criterion) {
    let cov = CovarianceSpec::identity(500);
    c.bench_function("width_l1_ball_mc_2000", |b| {
        b.iter(|| width_ball(black_box(&cov), ConstraintSet::l1_ball(1.0), 2000, 7).unwrap())
    });
    c.bench_function("statistical_dimension_psi", |b| b.iter(|| statistical_dimension_psi(black_box(0.025)).unwrap()));
    let w = sparse_wstar(200, 5);
    let mut g = c.benchmark_group("descent_cone");
    g.sample_size(20);
    g.bench_function("d200_k5_mc_500", |b| b.iter(|| l1_descent_cone_dimension(w.view(), 500, 7).unwrap()));
    g.finish();
}

fn localization(c: &mut Criterion) {
    let full = Arc::new(FullSpaceWidth::closed_form(&CovarianceSpec::identity(1024)));
    let f = SummaryFunctional::new(Sign::Plus, 0.05, 0.7, 2048, full).unwrap();
    c.bench_function("psi_minimize_full_space", |b| b.iter(|| psi_minimize(black_box(&f), 20.0).unwrap()));

    let mut g = c.benchmark_group("isotropic_ball");
    g.sample_size(10);
    g.bench_function("setup_mc_2000", |b| b.iter(|| IsotropicBallWidth::new(2.0, 1.0, 1024, 2000, 7).unwrap()));
    let ball = Arc::new(IsotropicBallWidth::new(2.0, 1.0, 1024, 2000, 7).unwrap());
    let f = SummaryFunctional::new(Sign::Plus, 0.05, 0.7, 2048, ball).unwrap();
    g.bench_function("psi_minimize", |b| b.iter(|| psi_minimize(black_box(&f), 20.0).unwrap()));
    g.finish();
}

criterion_group!(benches, widths, localization);
criterion_main!(benches);
