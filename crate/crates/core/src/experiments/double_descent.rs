//! Min-norm least squares across aspect ratios d/n under Σ = I.

use std::sync::Arc;

use ndarray::Array1;

use super::config::{field, Field, Kind};
use super::stats::{allowed_failure_rate, mean};
use super::{par_trials, trial_seed, ExperimentConfig, ResultTable, Row, RowSink, Summary};
use crate::bounds::{
    isotropic_interp_interval, isotropic_interp_interval_explicit, ols_interval, ols_interval_explicit,
};
use crate::error::{Error, Result};
use crate::estimators::least_squares_minnorm;
use crate::model::{eps36, sample_dataset, CovarianceSpec, RegressionProblem};

pub(super) const SCHEMA: &[Field] = &[
    field("n", Kind::Int, "1024", "sample size"),
    field("sigma2", Kind::Float, "0.5", "noise variance"),
    field("wstar_norm", Kind::Float, "2", "‖w*‖₂"),
    field("ratios", Kind::FloatList, "0.1,0.25,0.5,0.75,0.9,1,1.1,1.25,1.5,2,3,4,8", "d/n grid"),
    field("trials", Kind::Int, "30", "trials per grid point"),
    field("loss_rtol", Kind::Float, "0.05", "allowed relative error of the mean loss and norm"),
    field(
        "bd2_rtol",
        Kind::Float,
        "0.1",
        "allowed relative gap between mean bd2 and mean loss at the largest ratio, if at least 8",
    ),
];

pub(super) const QUANTITIES: &[&str] = &["train", "loss", "norm_sq", "bd1", "bd2", "bd2_explicit", "null", "bayes"];

/// Limit of L(ŵ) as n → ∞ with d/n = γ; None at γ = 1.
pub fn limit_loss(gamma: f64, sigma2: f64, wstar_sq: f64) -> Option<f64> {
    if gamma < 1.0 {
        Some(sigma2 / (1.0 - gamma))
    } else if gamma > 1.0 {
        Some((1.0 - 1.0 / gamma) * wstar_sq + sigma2 * gamma / (gamma - 1.0))
    } else {
        None
    }
}

/// Limit of ‖ŵ‖² for γ > 1.
pub fn limit_norm_sq(gamma: f64, sigma2: f64, wstar_sq: f64) -> Option<f64> {
    (gamma > 1.0).then(|| wstar_sq / gamma + sigma2 / (gamma - 1.0))
}

struct Point {
    rows: Vec<Row>,
    loss: f64,
    norm_sq: f64,
    bd2: f64,
    covered: Option<bool>,
    covered_summarized: Option<bool>,
}

fn label(g: f64) -> String {
    format!("{g}")
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(ResultTable, Summary)> {
    let n = cfg.usize("n");
    let (s2, delta, trials) = (cfg.f64("sigma2"), cfg.delta(), cfg.usize("trials"));
    let a = cfg.f64("wstar_norm");
    let ratios = cfg.f64_list("ratios");
    if ratios.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Config("key `ratios` must hold positive values".into()));
    }
    let dims: Vec<usize> = ratios.iter().map(|&r| ((r * n as f64).round() as usize).max(1)).collect();
    let sigma = s2.sqrt();
    let ws2 = a * a;
    let eps = eps36(n, delta);
    let problems: Vec<Arc<RegressionProblem>> = dims
        .iter()
        .map(|&d| {
            let mut w = Array1::zeros(d);
            w[0] = a;
            RegressionProblem::new(sigma, w, CovarianceSpec::identity(d)).map(Arc::new)
        })
        .collect::<Result<_>>()?;

    let outs: Vec<Vec<Point>> = par_trials(trials, |t| {
        let mut points = Vec::with_capacity(dims.len());
        for (i, &d) in dims.iter().enumerate() {
            let gamma = d as f64 / n as f64;
            let data = sample_dataset(&problems[i], n, trial_seed(cfg.seed(), &format!("double_descent/{d}"), t))?;
            let w = least_squares_minnorm(&data)?;
            let train = w.diagnostics.objective;
            let loss = problems[i].population_loss(w.w.view())?;
            let norm_sq = w.w.dot(&w.w);
            let bd1 = (train.sqrt() + (norm_sq * gamma).sqrt()).powi(2);
            let (bd2, bd2_explicit, covered, covered_summarized) = if gamma < 1.0 {
                let s = ols_interval(train, gamma, n, delta, s2)?;
                let e = ols_interval_explicit(train, gamma, n, delta, s2)?;
                let cov = e.applicable.then(|| {
                    let (lo, hi) = e.interval().expect("two-sided");
                    let r = (loss - s2).max(0.0).sqrt();
                    r >= lo && r <= hi
                });
                let (lo, hi) = s.interval().expect("two-sided");
                let r = (loss - s2).max(0.0).sqrt();
                let cov_s = Some(r >= lo && r <= hi);
                (s2 + s.value * s.value, if e.applicable { s2 + e.value * e.value } else { f64::INFINITY }, cov, cov_s)
            } else if gamma > 1.0 {
                let s = isotropic_interp_interval(norm_sq, ws2, s2, gamma, eps)?;
                let e = isotropic_interp_interval_explicit(norm_sq, ws2, s2, gamma, n, delta)?;
                let cov = e.applicable.then(|| {
                    let (lo, hi) = e.interval().expect("two-sided");
                    loss >= lo && loss <= hi
                });
                let cov_s = s.applicable.then(|| {
                    let (lo, hi) = s.interval().expect("two-sided");
                    loss >= lo && loss <= hi
                });
                (if s.applicable { s.value } else { f64::NAN }, e.value, cov, cov_s)
            } else {
                (f64::NAN, f64::NAN, None, None)
            };
            let mut sink = RowSink::new(t, "d_over_n", gamma);
            sink.put("train", train)
                .put("loss", loss)
                .put("norm_sq", norm_sq)
                .put("bd1", bd1)
                .put("bd2", bd2)
                .put("bd2_explicit", bd2_explicit)
                .put("null", problems[i].null_loss())
                .put("bayes", s2);
            points.push(Point { rows: sink.rows, loss, norm_sq, bd2, covered, covered_summarized });
        }
        Ok(points)
    })?;

    let mut summary = Summary::new("double_descent");
    let tol = cfg.f64("loss_rtol");
    for (i, &d) in dims.iter().enumerate() {
        let gamma = d as f64 / n as f64;
        let g = label(gamma);
        let col = |f: &dyn Fn(&Point) -> f64| outs.iter().map(|p| f(&p[i])).collect::<Vec<f64>>();
        let ml = mean(&col(&|p| p.loss));
        if let Some(lim) = limit_loss(gamma, s2, ws2) {
            if (gamma - 1.0).abs() >= 0.25 {
                summary.within(format!("mean_loss[gamma={g}]"), lim, ml, tol * lim);
            }
        }
        if let Some(lim) = limit_norm_sq(gamma, s2, ws2) {
            if gamma >= 1.25 {
                summary.within(format!("mean_norm_sq[gamma={g}]"), lim, mean(&col(&|p| p.norm_sq)), tol * lim);
            }
        }
        let base = if gamma < 1.0 { "ols_interval" } else { "interp_interval" };
        for (suffix, cov) in [
            ("", outs.iter().filter_map(|p| p[i].covered).collect::<Vec<bool>>()),
            ("_summarized", outs.iter().filter_map(|p| p[i].covered_summarized).collect()),
        ] {
            if !cov.is_empty() {
                let fail = cov.iter().filter(|&&c| !c).count() as f64 / cov.len() as f64;
                let allowed = allowed_failure_rate(cov.len(), delta);
                summary.at_most(format!("{base}{suffix}_failure_rate[gamma={g}]"), allowed, fail);
            }
        }
    }
    if let Some(i) = (0..dims.len()).max_by(|&x, &y| dims[x].cmp(&dims[y])) {
        let gamma = dims[i] as f64 / n as f64;
        if gamma >= 8.0 {
            let ml = mean(&outs.iter().map(|p| p[i].loss).collect::<Vec<_>>());
            let mb = mean(&outs.iter().map(|p| p[i].bd2).collect::<Vec<_>>());
            summary.within(format!("bd2_tracks_loss[gamma={}]", label(gamma)), ml, mb, cfg.f64("bd2_rtol") * ml);
        }
    }

    let mut table = ResultTable::new("double_descent");
    for p in outs {
        for pt in p {
            table.extend(pt.rows);
        }
    }
    Ok((table, summary))
}
