mod common;

use approx::assert_relative_eq;
use common::{brute_l1_projection, e1, gauss_solve, isotropic_data};
use ndarray::{Array1, Array2};
use optrate_core::estimators::*;
use optrate_core::linalg::{norm1, norm2, norm_inf};

fn normal_equations(x: &Array2<f64>, y: &Array1<f64>, ridge: f64) -> Array1<f64> {
    let mut g = x.t().dot(x);
    for i in 0..g.nrows() {
        g[[i, i]] += ridge;
    }
    gauss_solve(&g, &x.t().dot(y))
}

#[test]
fn ols_matches_normal_equations() {
    let data = isotropic_data(80, 12, 0.5, e1(12, 1.0), 3);
    let p = least_squares_minnorm(&data).unwrap();
    let w = normal_equations(&data.x, &data.y, 0.0);
    assert!(norm_inf((&p.w - &w).view()) < 1e-10);
    assert_eq!(p.diagnostics.method, "cholesky");
    assert!(p.diagnostics.kkt_residual < 1e-9);
}

#[test]
fn min_norm_interpolates_in_row_space() {
    let data = isotropic_data(30, 90, 0.5, e1(90, 1.0), 4);
    let p = least_squares_minnorm(&data).unwrap();
    assert!(data.empirical_loss(p.w.view()).unwrap() < 1e-20);
    let xxt = data.x.dot(&data.x.t());
    let a = gauss_solve(&xxt, &data.y);
    let w = data.x.t().dot(&a);
    assert!(norm_inf((&p.w - &w).view()) < 1e-10);
}

#[test]
fn ridge_path_matches_direct_solves() {
    for (n, d) in [(50, 20), (20, 50)] {
        let data = isotropic_data(n, d, 0.5, e1(d, 2.0), 5);
        let lambdas = [1e-4, 0.01, 1.0, 50.0];
        let path = ridge_path(&data, &lambdas).unwrap();
        let sr = SpectralRidge::new(&data).unwrap();
        for (p, &l) in path.iter().zip(&lambdas) {
            let w = normal_equations(&data.x, &data.y, n as f64 * l);
            assert!(norm_inf((&p.w - &w).view()) < 1e-9 * norm2(w.view()).max(1.0));
            assert_relative_eq!(sr.norm(l), norm2(w.view()), max_relative = 1e-9);
            let direct = data.empirical_loss(w.view()).unwrap();
            assert!((sr.train_loss(l) - direct).abs() <= 1e-8 * direct + 1e-12);
        }
    }
    let data = isotropic_data(10, 5, 0.5, e1(5, 1.0), 1);
    assert!(ridge_path(&data, &[0.0]).is_err());
}

#[test]
fn ridge_norm_decreases_and_vanishes() {
    let data = isotropic_data(40, 100, 0.5, e1(100, 1.0), 6);
    let sr = SpectralRidge::new(&data).unwrap();
    let mut prev = f64::INFINITY;
    for k in -8..=4 {
        let nrm = sr.norm(10f64.powi(k));
        assert!(nrm < prev);
        prev = nrm;
    }
    assert!(sr.norm(1e12) < 1e-9);
    let ls = least_squares_minnorm(&data).unwrap();
    assert_relative_eq!(sr.norm(0.0), ls.norm2(), max_relative = 1e-9);
}

#[test]
fn l2_constrained_hits_radius() {
    let data = isotropic_data(40, 100, 0.5, e1(100, 1.0), 7);
    let ls = least_squares_minnorm(&data).unwrap();
    let r = 0.5 * ls.norm2();
    let p = l2_constrained_erm(&data, r).unwrap();
    assert_relative_eq!(p.norm2(), r, max_relative = 1e-8);
    let big = l2_constrained_erm(&data, 2.0 * ls.norm2()).unwrap();
    assert!(norm_inf((&big.w - &ls.w).view()) < 1e-12);
    let zero = l2_constrained_erm(&data, 0.0).unwrap();
    assert_eq!(norm2(zero.w.view()), 0.0);
    assert!(l2_constrained_erm(&data, -1.0).is_err());
}

#[test]
fn l2_constrained_beats_feasible_points() {
    let data = isotropic_data(30, 60, 0.3, e1(60, 1.0), 8);
    let r = 0.6;
    let p = l2_constrained_erm(&data, r).unwrap();
    let best = data.empirical_loss(p.w.view()).unwrap();
    for s in 0..20u64 {
        let mut rng = optrate_core::rng::rng_from_seed(s);
        let v = optrate_core::rng::normal_vec(&mut rng, 60);
        let v = &v * (r / norm2(v.view()));
        let mixed = &p.w * 0.9 + &v * 0.1;
        let mixed = &mixed * (r / norm2(mixed.view())).min(1.0);
        assert!(data.empirical_loss(mixed.view()).unwrap() >= best - 1e-12);
    }
}

#[test]
fn l1_projection_matches_brute_force() {
    let mut rng = optrate_core::rng::rng_from_seed(11);
    for d in 1..=4 {
        for _ in 0..200 {
            let v = optrate_core::rng::normal_vec(&mut rng, d) * 2.0;
            let b = 0.1 + 2.0 * rand::Rng::random::<f64>(&mut rng);
            let fast = project_l1_ball(v.view(), b);
            let brute = brute_l1_projection(v.as_slice().unwrap(), b);
            for i in 0..d {
                assert!((fast[i] - brute[i]).abs() <= 1e-8, "d = {d}");
            }
        }
    }
}

#[test]
fn simplex_projection_properties() {
    let mut rng = optrate_core::rng::rng_from_seed(12);
    for _ in 0..100 {
        let v = optrate_core::rng::normal_vec(&mut rng, 6);
        let p = project_simplex(v.view(), 1.5);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert_relative_eq!(p.sum(), 1.5, epsilon = 1e-12);
    }
}

#[test]
fn lasso_kkt_conditions() {
    let data = isotropic_data(60, 40, 0.5, e1(40, 1.0), 9);
    let b = 0.8;
    let p = l1_constrained_erm(&data, b).unwrap();
    assert!(p.diagnostics.converged);
    assert_relative_eq!(norm1(p.w.view()), b, max_relative = 1e-9);
    let n = data.n() as f64;
    let g = data.x.t().dot(&(data.x.dot(&p.w) - &data.y)) / n;
    let theta = norm_inf(g.view());
    for i in 0..40 {
        if p.w[i].abs() > 1e-9 {
            assert!((-g[i] - theta * p.w[i].signum()).abs() < 1e-6);
        }
    }
}

#[test]
fn lasso_inactive_constraint_returns_ols() {
    let data = isotropic_data(100, 10, 0.2, e1(10, 1.0), 10);
    let ls = least_squares_minnorm(&data).unwrap();
    let p = l1_constrained_erm(&data, 10.0 * norm1(ls.w.view())).unwrap();
    assert!(norm_inf((&p.w - &ls.w).view()) < 1e-7);
    assert_eq!(norm2(l1_constrained_erm(&data, 0.0).unwrap().w.view()), 0.0);
}

#[test]
fn lasso_noiseless_recovery() {
    let d = 200;
    let mut wstar = Array1::zeros(d);
    for i in 0..5 {
        wstar[i] = if i % 2 == 0 { 1.0 } else { -1.0 };
    }
    let data = isotropic_data(150, d, 0.0, wstar.clone(), 13);
    let p = l1_constrained_erm(&data, norm1(wstar.view())).unwrap();
    assert!(norm2((&p.w - &wstar).view()) < 1e-6);
}

#[test]
fn near_erm_identity_and_alpha() {
    let data = isotropic_data(512, 256, 0.7, e1(256, 1.0), 14);
    let ne = near_erm_family(&data, 1.0).unwrap();
    assert_relative_eq!(ne.alpha, 1.0 + (1.0f64 / 2.0).sqrt() * 512f64.powf(-0.25), epsilon = 1e-14);
    assert_relative_eq!(ne.train_gap, ne.train_gap_identity, max_relative = 1e-8);
    assert!(ne.pop_gap > 0.0);
    assert!(near_erm_family(&data, 0.0).unwrap().train_gap.abs() < 1e-12);
    let wide = isotropic_data(10, 20, 0.7, e1(20, 1.0), 14);
    assert!(near_erm_family(&wide, 1.0).is_err());
}
