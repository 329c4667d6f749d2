mod common;

use std::sync::Arc;

use common::{e1, isotropic_data};
use ndarray::Array1;
use optrate_core::bounds::*;
use optrate_core::estimators::{project_l1_ball, project_simplex, SpectralRidge};
use optrate_core::linalg::norm1;
use optrate_core::widths::{FullSpaceWidth, IsotropicBallWidth, LocalizedWidth};
use optrate_core::CovarianceSpec;
use proptest::prelude::*;

fn vec_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..max_len)
}

fn recombines(r: &BoundReport) -> bool {
    if r.value.is_infinite() {
        return r.recombine() == r.value;
    }
    (r.recombine() - r.value).abs() <= 1e-10 * r.value.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn l1_projection_is_optimal(v in vec_strategy(12), b in 0.0f64..6.0, seed in any::<u64>()) {
        let v = Array1::from(v);
        let p = project_l1_ball(v.view(), b);
        prop_assert!(norm1(p.view()) <= b * (1.0 + 1e-12) + 1e-15);
        let again = project_l1_ball(p.view(), b);
        prop_assert!((&again - &p).iter().all(|x| x.abs() < 1e-12));
        let mut rng = optrate_core::rng::rng_from_seed(seed);
        for _ in 0..10 {
            let x = optrate_core::rng::normal_vec(&mut rng, v.len());
            let x = project_l1_ball(x.view(), b);
            prop_assert!((&v - &p).dot(&(&x - &p)) <= 1e-9);
        }
    }

    #[test]
    fn simplex_projection_feasible(v in vec_strategy(12), s in 0.01f64..5.0) {
        let p = project_simplex(Array1::from(v).view(), s);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.sum() - s).abs() <= 1e-10 * s.max(1.0));
    }

    #[test]
    fn reports_recombine(
        emp in 0.0f64..3.0,
        f in 0.0f64..10.0,
        n in 10usize..100_000,
        delta in 0.001f64..0.5,
        gamma in 0.0f64..0.99,
    ) {
        prop_assert!(recombines(&optimistic_bound(emp, f, n, delta).unwrap()));
        prop_assert!(recombines(&ols_interval(emp, gamma, n, delta, 0.5).unwrap()));
        prop_assert!(recombines(&ols_interval_explicit(emp, gamma, n, delta, 0.5).unwrap()));
        let p = gamma * n as f64;
        prop_assert!(recombines(&low_complexity_bound(p, n, 0.5, delta).unwrap()));
        prop_assert!(recombines(&lasso_compat_bound(0.5, emp, 0.1, 0.5, 3, 40, n, delta, 1.0).unwrap()));
    }

    #[test]
    fn applicable_reports_nonnegative(emp in 0.0f64..3.0, n in 100usize..1_000_000, gamma in 0.0f64..0.99) {
        let r = ols_interval(emp, gamma, n, 0.05, 0.5).unwrap();
        let (lo, hi) = r.interval().unwrap();
        prop_assert!(lo <= hi && hi >= 0.0);
        let h = ols_highprob_deviation(gamma.min(0.999), n, 0.05, 0.5, HIGHPROB_K).unwrap();
        prop_assert!(!h.applicable || h.excess >= 0.0);
    }

    #[test]
    fn psi_monotone_in_delta(r in 0.0f64..5.0, d1 in 0.001f64..0.5, d2 in 0.001f64..0.5) {
        let (small, large) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let w = Arc::new(FullSpaceWidth::closed_form(&CovarianceSpec::identity(50)));
        let p = SummaryFunctional::new(Sign::Plus, large, 0.8, 500, w).unwrap();
        let m = p.with_sign(Sign::Minus);
        prop_assert!(psi_eval(&p.with_delta(small).unwrap(), r) >= psi_eval(&p, r));
        prop_assert!(psi_eval(&m.with_delta(small).unwrap(), r) <= psi_eval(&m, r));
    }

    #[test]
    fn localized_ball_width_nested(b in 0.1f64..3.0, a in 0.0f64..3.0, r1 in 0.0f64..6.0, r2 in 0.0f64..6.0) {
        let w = IsotropicBallWidth::new(b, a, 20, 64, 5).unwrap();
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let (wl, wh) = (w.width(lo), w.width(hi));
        prop_assert!(wl.is_empty() || wh.value >= wl.value - 1e-12);
    }

    #[test]
    fn ridge_norm_monotone(seed in 0u64..1000, l1 in -6.0f64..2.0, l2 in -6.0f64..2.0) {
        let data = isotropic_data(15, 25, 0.5, e1(25, 1.0), seed);
        let sr = SpectralRidge::new(&data).unwrap();
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        prop_assert!(sr.norm(10f64.powf(hi)) <= sr.norm(10f64.powf(lo)) * (1.0 + 1e-12));
        prop_assert!(sr.train_loss(10f64.powf(hi)) >= sr.train_loss(10f64.powf(lo)) * (1.0 - 1e-9) - 1e-15);
    }
}

#[test]
fn psi_minus_midpoint_convex() {
    let full = Arc::new(FullSpaceWidth::monte_carlo(&CovarianceSpec::identity(100), 500, 1).unwrap());
    let f = SummaryFunctional::new(Sign::Minus, 0.05, 1.0, 400, full).unwrap();
    assert!(common::midpoint_convex(|r| psi_eval(&f, r), 0.0, 5.0));
    let ball = Arc::new(IsotropicBallWidth::new(1.5, 1.0, 100, 500, 2).unwrap());
    let mut f = SummaryFunctional::new(Sign::Minus, 0.05, 1.0, 400, ball.clone()).unwrap();
    f.inflate_mc = false;
    assert!(common::midpoint_convex(|r| psi_eval(&f, r), 0.0, 3.0));
    let mut g = SummaryFunctional::new(Sign::Plus, 0.05, 1.0, 400, ball).unwrap();
    g.inflate_mc = false;
    assert!(common::midpoint_convex(|r| psi_eval(&g, r), 0.0, 3.0));
}
