//! ℓ1-constrained ERM with B = ‖w*‖₁: exact recovery around the phase
//! transition and coverage of the LASSO bounds.

use std::sync::Arc;

use ndarray::Array1;

use super::config::{field, Field, Kind};
use super::stats::allowed_failure_rate;
use super::{par_trials, trial_seed, ExperimentConfig, ResultTable, Row, RowSink, Summary};
use crate::bounds::{lasso_compat_bound, lasso_isotropic_interval, lasso_lowcomplexity_p, low_complexity_bound};
use crate::error::{Error, Result};
use crate::estimators::l1_constrained_erm;
use crate::linalg::{norm1, norm2};
use crate::model::{beta1, sample_dataset, CovarianceSpec, RegressionProblem};
use crate::widths::{compatibility_lower_bound, l1_descent_cone_dimension, statistical_dimension_psi};

pub(super) const SCHEMA: &[Field] = &[
    field("d", Kind::Int, "200", "dimension"),
    field("k", Kind::Int, "5", "support size of w*"),
    field("amplitude", Kind::Float, "1", "value of the nonzero entries of w*"),
    field("n", Kind::IntList, "500,0,4000", "sample size per cell; 0 means ⌊0.5·d·ψ(k/d)⌋"),
    field("sigma", Kind::FloatList, "0,0,1", "noise level per cell"),
    field("trials", Kind::IntList, "50,50,200", "trials per cell"),
    field("mc_samples", Kind::Int, "2000", "Monte Carlo samples for the descent cone"),
    field("recovery_tol", Kind::Float, "1e-6", "‖ŵ − w*‖₂ below which a trial counts as exact recovery"),
    field("min_failure_rate", Kind::Float, "0.8", "required failure rate below the phase transition"),
];

pub(super) const QUANTITIES: &[&str] = &[
    "excess",
    "train",
    "error_l2",
    "recovered",
    "compat_bound",
    "fast_bound",
    "iso_lower",
    "iso_upper",
    "cone_dim",
    "psi_dim",
];

type Coverage = fn(&Outcome) -> Option<bool>;

struct Outcome {
    rows: Vec<Row>,
    recovered: bool,
    compat: Option<bool>,
    fast: Option<bool>,
    iso: Option<bool>,
}

/// ⌊0.5·d·ψ(k/d)⌋, half the sample size at the phase transition.
pub fn below_transition_n(d: usize, k: usize) -> Result<usize> {
    Ok((0.5 * d as f64 * statistical_dimension_psi(k as f64 / d as f64)?).floor() as usize)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(ResultTable, Summary)> {
    let (d, k, amp, delta) = (cfg.usize("d"), cfg.usize("k"), cfg.f64("amplitude"), cfg.delta());
    let (ns, sigmas, ts) = (cfg.usize_list("n"), cfg.f64_list("sigma"), cfg.usize_list("trials"));
    if ns.len() != sigmas.len() || ns.len() != ts.len() {
        return Err(Error::Config("keys `n`, `sigma` and `trials` must have the same length".into()));
    }
    if k == 0 || k > d || amp == 0.0 {
        return Err(Error::Config("need 1 ≤ k ≤ d and a nonzero amplitude".into()));
    }
    let mut wstar = Array1::zeros(d);
    wstar.slice_mut(ndarray::s![..k]).fill(amp);
    let b = norm1(wstar.view());
    let cov = CovarianceSpec::identity(d);
    let phi2 = compatibility_lower_bound(&cov);
    let max_diag = cov.max_diag();
    let psi_dim = d as f64 * statistical_dimension_psi(k as f64 / d as f64)?;
    let cone =
        l1_descent_cone_dimension(wstar.view(), cfg.usize("mc_samples"), trial_seed(cfg.seed(), "lasso/cone", 0))?;
    let p_fast = lasso_lowcomplexity_p(k, d, max_diag, phi2, delta);

    let mut table = ResultTable::new("lasso");
    let mut summary = Summary::new("lasso");
    for (cell, ((&n_raw, &sigma), &trials)) in ns.iter().zip(&sigmas).zip(&ts).enumerate() {
        let n = if n_raw == 0 { below_transition_n(d, k)? } else { n_raw };
        if n == 0 || !(sigma >= 0.0) {
            return Err(Error::Config(format!("cell {cell}: need n ≥ 1 and sigma ≥ 0")));
        }
        let s2 = sigma * sigma;
        let problem = Arc::new(RegressionProblem::new(sigma, wstar.clone(), cov.clone())?);
        let b1 = beta1(n, delta);
        let compat = lasso_compat_bound(sigma, b1, b1, phi2, k, d, n, delta, max_diag)?;
        let fast = if p_fast / (n as f64) <= 0.999 { Some(low_complexity_bound(p_fast, n, s2, delta)?) } else { None };
        let fast = fast.filter(|f| f.applicable);
        let gamma_cone = cone.stat_dim.value / n as f64;
        let tol = cfg.f64("recovery_tol");

        let outs = par_trials(trials, |t| {
            let data = sample_dataset(&problem, n, trial_seed(cfg.seed(), &format!("lasso/{n}/{sigma}"), t))?;
            let fit = l1_constrained_erm(&data, b)?;
            let err = norm2((&fit.w - &wstar).view());
            let excess = problem.excess_risk(fit.w.view())?;
            let train = fit.diagnostics.objective;
            let iso = lasso_isotropic_interval(train, gamma_cone, n, delta, s2)?;
            let (lo, hi) = match iso.interval() {
                Some((lo, hi)) if iso.applicable => (lo.max(0.0).powi(2), hi * hi),
                _ => (f64::NAN, f64::NAN),
            };
            let mut sink = RowSink::new(t, "cell", cell as f64);
            sink.put("excess", excess)
                .put("train", train)
                .put("error_l2", err)
                .put("recovered", if err <= tol { 1.0 } else { 0.0 })
                .put("compat_bound", if compat.applicable { compat.value } else { f64::NAN })
                .put("fast_bound", fast.as_ref().map_or(f64::NAN, |f| f.value))
                .put("iso_lower", lo)
                .put("iso_upper", hi)
                .put("cone_dim", cone.stat_dim.value)
                .put("psi_dim", psi_dim);
            let noisy = sigma > 0.0;
            Ok(Outcome {
                rows: sink.rows,
                recovered: err <= tol,
                compat: (noisy && compat.applicable).then_some(excess <= compat.value),
                fast: fast.as_ref().filter(|_| noisy).map(|f| excess <= f.value),
                iso: (noisy && iso.applicable).then_some(excess >= lo && excess <= hi),
            })
        })?;

        let tag = format!("n={n},sigma={sigma}");
        if sigma == 0.0 {
            let rate = outs.iter().filter(|o| o.recovered).count() as f64 / trials as f64;
            if n as f64 >= psi_dim {
                summary.at_least(format!("recovery_rate[{tag}]"), 1.0, rate);
            } else {
                summary.at_least(format!("recovery_failure_rate[{tag}]"), cfg.f64("min_failure_rate"), 1.0 - rate);
            }
        }
        let coverage: [(&str, Coverage); 3] =
            [("lasso_compat", |o| o.compat), ("lasso_fast_rate", |o| o.fast), ("lasso_isotropic", |o| o.iso)];
        for (name, get) in coverage {
            let cov: Vec<bool> = outs.iter().filter_map(get).collect();
            if !cov.is_empty() {
                let fail = cov.iter().filter(|&&c| !c).count() as f64 / cov.len() as f64;
                summary.at_most(format!("{name}_failure_rate[{tag}]"), allowed_failure_rate(cov.len(), delta), fail);
            }
        }
        for o in outs {
            table.extend(o.rows);
        }
    }
    Ok((table, summary))
}
