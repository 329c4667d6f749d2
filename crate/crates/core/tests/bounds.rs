use std::sync::Arc;

use approx::assert_relative_eq;
use ndarray::{arr1, Array1};
use optrate_core::bounds::*;
use optrate_core::model::{beta1, beta2, split_covariance};
use optrate_core::widths::{FullSpaceWidth, SetKind, SingletonWidth, WidthEstimate};
use optrate_core::CovarianceSpec;

fn assert_recombines(r: &BoundReport) {
    assert!((r.recombine() - r.value).abs() <= 1e-10 * r.value.abs().max(1.0), "{}", r.name);
}

#[test]
fn constants_match_closed_forms() {
    assert_relative_eq!(beta1(10_000, 0.05), 0.32775, epsilon = 1e-5);
    let by_hand = 32.0 * ((20f64).ln() / 1e4).sqrt() + 32.0 * 0.01;
    assert_relative_eq!(beta2(10_000, 0.05, 1), by_hand, epsilon = 1e-12);
    assert_relative_eq!(beta2(10_000, 0.05, 1), 0.87386, epsilon = 1e-5);
}

#[test]
fn optimistic_zero_complexity() {
    let r = optimistic_bound(0.5, 0.0, 10_000, 0.05).unwrap();
    assert_relative_eq!(r.value, (1.0 + beta1(10_000, 0.05)) * 0.5, epsilon = 1e-14);
    assert!(r.applicable);
    assert_recombines(&r);
    assert!(!optimistic_bound(0.5, 1.0, 100, 0.05).unwrap().applicable);
    assert!(optimistic_bound(-1.0, 0.0, 100, 0.05).is_err());
}

fn spiked_ctx() -> (SplitContext, Array1<f64>) {
    let cov = CovarianceSpec::spiked(arr1(&[1.0]), 0.05, 40).unwrap();
    let mut wstar = Array1::zeros(41);
    wstar[0] = 1.0;
    let split = split_covariance(&cov, 1).unwrap();
    (SplitContext::new(split, SetKind::L2Ball, wstar.view(), 2000, 7).unwrap(), wstar)
}

#[test]
fn cov_split_point_set_and_linearity() {
    let (ctx, _) = spiked_ctx();
    assert_relative_eq!(ctx.wstar_sigma2, 0.0, epsilon = 1e-15);
    let set = optrate_core::widths::ConstraintSet::l2_ball(2.0);
    let r0 = cov_split_bound(0.3, set, &ctx, 500, 0.05, 0.0).unwrap();
    assert_relative_eq!(r0.value, (1.0 + ctx.beta2(500, 0.05)) * 0.3, epsilon = 1e-14);
    let r1 = cov_split_bound(0.3, set, &ctx, 500, 0.05, 1.0).unwrap();
    let r2 = cov_split_bound(0.3, set, &ctx, 500, 0.05, 2.0).unwrap();
    for name in ["width", "radius_confidence"] {
        assert_relative_eq!(r2.term(name).unwrap(), 2.0 * r1.term(name).unwrap(), epsilon = 1e-14);
    }
    assert_recombines(&r2);
}

#[test]
fn c_functional_matches_terms() {
    let (ctx, _) = spiked_ctx();
    let set = optrate_core::widths::ConstraintSet::l2_ball(1.5);
    let r = cov_split_bound(0.0, set, &ctx, 400, 0.1, 1.0).unwrap();
    let c = c_functional(1.5, &ctx, 400, 0.1).unwrap();
    let sum: f64 = r.terms.iter().map(|t| t.value).sum();
    assert_relative_eq!(c, sum, epsilon = 1e-14);
}

#[test]
fn flatness_examples() {
    assert_relative_eq!(flatness_bound(0.7, 0.0, 0.0).unwrap(), 0.49, epsilon = 1e-15);
    assert_relative_eq!(flatness_bound(1.0, 0.04, 0.06).unwrap(), 2.25, epsilon = 1e-12);
    assert!(flatness_bound(1.0, 0.2, 0.0).unwrap() > flatness_bound(1.0, 0.1, 0.0).unwrap());
}

#[test]
fn optimally_tuned_trivial_limits() {
    let (ctx, _) = spiked_ctx();
    let r = optimally_tuned_bound(0.8, 0.0, &ctx, 1000, 0.05).unwrap();
    assert_relative_eq!(r.value, (1.0 + 3.0 * ctx.beta2(1000, 0.05)) * 0.64, epsilon = 1e-14);
    let zero = split_covariance(&CovarianceSpec::spiked(arr1(&[2.0]), 0.0, 5).unwrap(), 1).unwrap();
    let r = optimally_tuned_ridge_bound(0.8, 3.0, &zero, 1000, 0.05).unwrap();
    assert_relative_eq!(r.value, (1.0 + 3.0 * beta2(1000, 0.05, 1)) * 0.64, epsilon = 1e-14);
}

#[test]
fn ols_interval_tight_at_zero_eps() {
    let (s2, g) = (0.5, 0.3);
    let r = ols_interval_eps(s2 * (1.0 - g), g, 0.0, s2, 0.05).unwrap();
    assert_relative_eq!(r.term("half_width").unwrap(), 0.0, epsilon = 1e-15);
    assert_relative_eq!(r.term("center").unwrap(), (s2 * g / (1.0 - g)).sqrt(), epsilon = 1e-14);
    assert!(ols_interval(1.0, 1.0, 100, 0.05, 0.5).is_err());
    assert!(ols_interval_eps(0.1, 0.5, 0.0, 0.5, 0.05).unwrap().flags.contains(&"radicand_clamped"));
}

#[test]
fn ols_explicit_approaches_summary() {
    let (s2, g) = (0.5, 0.5);
    let emp = s2 * (1.0 - g);
    let big = ols_interval_explicit(emp, g, 1_000_000_000_000, 0.05, s2).unwrap();
    assert!(big.applicable);
    assert_relative_eq!(big.term("center").unwrap(), (s2 * g / (1.0 - g)).sqrt(), epsilon = 1e-4);
    let small = ols_interval_explicit(emp, g, 4096, 0.05, s2).unwrap();
    let eps = ((36.0f64 / 0.05).ln() / 4096.0).sqrt();
    let dd = 1.0 / (1.0 + 14.0 * eps) - (g.sqrt() + 2.0 * eps).powi(2);
    assert_relative_eq!(small.term("center").unwrap(), (g.sqrt() + 2.0 * eps) * emp.sqrt() / dd, epsilon = 1e-12);
    assert!(!ols_interval_explicit(emp, 0.9, 4096, 0.05, s2).unwrap().applicable);
}

#[test]
fn interpolation_interval_collapses_at_population_values() {
    let (g, ws2, s2) = (2.0, 4.0, 0.5);
    let w2 = isotropic_minnorm_norm_bound(g, s2, ws2, 0.0).unwrap();
    assert_relative_eq!(w2, 2.5, epsilon = 1e-15);
    let r = isotropic_interp_interval(w2, ws2, s2, g, 0.0).unwrap();
    assert_relative_eq!(r.term("center").unwrap(), 3.0, epsilon = 1e-14);
    assert_relative_eq!(r.term("half_width").unwrap(), 0.0, epsilon = 1e-7);
    assert!(isotropic_interp_interval(w2, ws2, s2, 1.0, 0.0).is_err());
    let e = isotropic_interp_interval_explicit(w2, ws2, s2, g, 1_000_000_000_000, 0.05).unwrap();
    assert!(e.applicable);
    let (lo, hi) = e.interval().unwrap();
    assert!(lo <= 3.0 + 1e-6 && hi >= 3.0 - 1e-6 && hi - lo < 0.1);
}

#[test]
fn lasso_interval_delegates_to_ols_shape() {
    let a = lasso_isotropic_interval(0.2, 0.3, 5000, 0.05, 0.25).unwrap();
    let b = ols_interval(0.2, 0.3, 5000, 0.05, 0.25).unwrap();
    assert_eq!(a.terms, b.terms);
    assert!(!lasso_isotropic_interval(0.2, 0.99999, 5000, 0.05, 0.25).unwrap().applicable);
    assert_relative_eq!(lasso_isotropic_asymptote(0.5, 0.5), 0.5, epsilon = 1e-15);
}

#[test]
fn lasso_compat_by_hand() {
    let (sigma, eps, b1, phi2, k, d, n, delta, md) = (0.7, 0.1, 0.2, 0.5, 3, 50, 100_000, 0.05, 1.0);
    let r = lasso_compat_bound(sigma, eps, b1, phi2, k, d, n, delta, md).unwrap();
    let s2 = sigma * sigma;
    let expect = 8.0 * (b1 + eps) * s2
        + 512.0 * (1.0 + eps) * (md / phi2) * s2 * k as f64 * (32.0 * d as f64 / delta).ln() / n as f64;
    assert_relative_eq!(r.value, expect, epsilon = 1e-12);
    assert!(r.applicable);
    assert!(!lasso_compat_bound(sigma, eps, b1, phi2, k, d, 100, delta, md).unwrap().applicable);
    assert!(lasso_compat_bound(sigma, eps, b1, 0.0, k, d, n, delta, md).is_err());
}

#[test]
fn low_complexity_chain() {
    assert_eq!(low_complexity_bound(0.0, 1000, 0.5, 0.05).unwrap().value, 0.0);
    assert!(low_complexity_bound(1000.0, 1000, 0.5, 0.05).is_err());
    let (p, n, s2, delta) = (1000.0, 100_000usize, 0.5, 0.05);
    let r = low_complexity_bound(p, n, s2, delta).unwrap();
    let b1 = 14.0 * ((12.0f64 / delta).ln() / n as f64).sqrt();
    let rho = (p / n as f64).sqrt();
    let direct = ((1.0 + 2.0 * b1) * s2.sqrt() * rho / (1.0 - (1.0 + 2.0 * b1).sqrt() * rho).powi(2)).powi(2) / s2;
    assert_relative_eq!(r.value, direct * s2, epsilon = 1e-12);
    let tau = r.multiplier - 1.0;
    assert!((1.0..=2.0).contains(&tau), "tau = {tau}");
    let far = low_complexity_bound(1.0, 1_000_000_000_000, 1.0, delta).unwrap();
    assert!(far.multiplier - 1.0 < 1e-3);
}

#[test]
fn low_complexity_specializations() {
    let p = ols_lowcomplexity_p(10, 0.05);
    assert_relative_eq!(p, (10f64.sqrt() + 2.0 * (720f64).ln().sqrt()).powi(2), epsilon = 1e-12);
    let q = lasso_lowcomplexity_p(5, 200, 1.0, 0.5, 0.05);
    assert_relative_eq!(q, 80.0 * (64_000f64).ln(), epsilon = 1e-10);
}

#[test]
fn exact_moments_examples() {
    let (m, v) = ols_exact_moments(100, 10, 1.0).unwrap();
    assert_relative_eq!(m, 99.0 / 89.0, epsilon = 1e-14);
    assert_relative_eq!(v, 2.0 * 10.0 * 99.0 / (89.0 * 89.0 * 87.0), epsilon = 1e-15);
    assert!((v - 0.0028731).abs() < 1e-6);
    assert_eq!(ols_exact_moments(50, 0, 2.0).unwrap(), (2.0, 0.0));
    assert!(ols_exact_moments(13, 10, 1.0).is_err());
    let mut prev = f64::INFINITY;
    for n in [1000usize, 10_000, 100_000] {
        let (_, v) = ols_exact_moments(n, n / 2, 1.0).unwrap();
        let gap = (n as f64 * v - 8.0).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 0.01);
}

#[test]
fn highprob_limits() {
    let d = ols_highprob_deviation(0.5, 1usize << 50, 0.05, 0.5, HIGHPROB_K).unwrap();
    assert!(d.applicable);
    assert_relative_eq!(d.excess, 0.5, epsilon = 1e-5);
    let z = ols_highprob_deviation(0.0, 1usize << 50, 0.05, 0.5, HIGHPROB_K).unwrap();
    assert!(z.excess < 1e-10 && z.summarized == 0.0);
    assert!(!ols_highprob_deviation(0.9, 100, 0.05, 0.5, HIGHPROB_K).unwrap().applicable);
    assert!(ols_highprob_deviation(0.9995, 100, 0.05, 0.5, HIGHPROB_K).is_err());
    let d = ols_highprob_deviation(0.5, 4096, 0.05, 0.5, HIGHPROB_K).unwrap();
    let eps = 2.0 * ((640.0f64).ln() / 4096.0).sqrt();
    let a = 0.5f64.sqrt() + eps;
    let expect = 0.5 * a * a / (((1.0 - eps).powi(2) - a * a).sqrt() - eps).powi(2);
    assert_relative_eq!(d.excess, expect, epsilon = 1e-12);
    assert_relative_eq!(d.loss_bound(0.5), 1.0 + d.deviation, epsilon = 1e-12);
}

fn full_space(d: usize) -> Arc<FullSpaceWidth> {
    Arc::new(FullSpaceWidth::closed_form(&CovarianceSpec::identity(d)))
}

#[test]
fn psi_at_zero_and_singleton() {
    let w = full_space(100);
    let n = 1000;
    let f = SummaryFunctional::new(Sign::Plus, 0.05, 0.7, n, w.clone()).unwrap();
    assert_relative_eq!(psi_eval(&f, 0.0), (1.0 + beta1(n, 0.05)) * 0.7, epsilon = 1e-14);
    let s = SummaryFunctional::new(Sign::Plus, 0.05, 0.7, n, Arc::new(SingletonWidth)).unwrap();
    let m = psi_minimize(&s, 5.0).unwrap();
    assert_eq!(m.r_star, 0.0);
    assert_relative_eq!(m.mu_star, (1.0 + beta1(n, 0.05)) * 0.7, epsilon = 1e-14);
}

#[test]
fn psi_limiting_minimizer() {
    let (n, d, s2) = (2048usize, 1024usize, 0.5f64);
    let f = SummaryFunctional::limiting(Sign::Plus, s2.sqrt(), n, full_space(d)).unwrap();
    let m = psi_minimize(&f, 20.0).unwrap();
    let u = optrate_core::widths::chi_mean(d) / (n as f64).sqrt();
    let oracle = s2.sqrt() * u / (1.0 - u * u).sqrt();
    assert_relative_eq!(m.r_star, oracle, epsilon = 1e-4);
    assert!((m.r_star / 0.5f64.sqrt() - 1.0).abs() < 0.02);
}

#[test]
fn psi_full_functional_converges() {
    let n = 10_000_000_000usize;
    let d = n / 2;
    let w = Arc::new(FullSpaceWidth::from_unit(WidthEstimate::closed_form((d as f64 - 0.5).sqrt())));
    let f = SummaryFunctional::new(Sign::Plus, 0.05, 0.5f64.sqrt(), n, w).unwrap();
    let m = psi_minimize(&f, 20.0).unwrap();
    assert!((m.r_star / 0.5f64.sqrt() - 1.0).abs() < 0.02, "r* = {}", m.r_star);
}

#[test]
fn psi_chi_mean_example() {
    let n = 1_000_000usize;
    let f = SummaryFunctional::limiting(Sign::Plus, 0.5f64.sqrt(), n, full_space(n / 2)).unwrap();
    let m = psi_minimize(&f, 20.0).unwrap();
    assert!((m.r_star.powi(2) - 0.5).abs() < 1e-4, "r*^2 = {}", m.r_star.powi(2));
}

#[test]
fn psi_plus_dominates_minus() {
    let w = full_space(300);
    let p = SummaryFunctional::new(Sign::Plus, 0.05, 1.0, 1000, w.clone()).unwrap();
    let m = p.with_sign(Sign::Minus);
    for i in 0..100 {
        let r = i as f64 * 0.05;
        assert!(psi_eval(&p, r) >= psi_eval(&m, r));
    }
}

#[test]
fn sublevel_inverse_consistency() {
    let n = 2_000_000usize;
    let f = SummaryFunctional::limiting(Sign::Minus, 1.0, n, full_space(n / 2)).unwrap();
    let m = psi_minimize(&f, 20.0).unwrap();
    let r0 = m.r_star + 1.5;
    let mu = psi_eval(&f, r0);
    let s = psi_sublevel(&f, mu, 0.5, 20.0).unwrap();
    assert!(!s.empty && !s.at_boundary);
    assert!((s.r_plus - r0).abs() < 1e-5);
    assert!(s.r_minus < m.r_star);
    assert!(psi_sublevel(&f, m.mu_star - 0.1, 0.5, 20.0).unwrap().empty);
    assert!(psi_sublevel(&f.with_sign(Sign::Plus), mu, 0.5, 20.0).is_err());
}

#[test]
fn sublevel_saturates_for_large_mu() {
    let f = SummaryFunctional::new(Sign::Minus, 0.05, 1.0, 5000, full_space(100)).unwrap();
    let s = psi_sublevel(&f, 1e6, 0.05, 30.0).unwrap();
    assert!(s.at_boundary);
    assert_eq!(s.r_plus, 30.0);
    assert_eq!(s.r_minus, 0.0);
}

#[test]
fn tau_rule() {
    let min = PsiMin { r_star: 0.2, mu_star: 1.0 };
    assert_eq!(localization_tau(0.05, 1.5, min), (0.05 / 3.0, false));
    assert_eq!(localization_tau(0.05, 0.9, min), (0.05, true));
    assert_eq!(localization_tau(0.05, 1.5, PsiMin { r_star: 0.0, mu_star: 1.0 }), (0.05, true));
}
