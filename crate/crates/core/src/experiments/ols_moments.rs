//! Sample moments of L(ŵ_OLS) against the closed forms, and coverage of
//! every OLS bound.

use std::sync::Arc;

use ndarray::Array1;

use super::config::{field, Field, Kind};
use super::stats::{allowed_failure_rate, mean, std_error, variance, variance_std_error};
use super::{par_trials, trial_seed, ExperimentConfig, ResultTable, Row, RowSink, Summary};
use crate::bounds::{
    low_complexity_bound, ols_exact_moments, ols_highprob_deviation, ols_interval, ols_interval_explicit,
    ols_lowcomplexity_p, BoundReport,
};
use crate::error::{Error, Result};
use crate::estimators::least_squares_minnorm;
use crate::model::{sample_dataset, CovarianceSpec, RegressionProblem};

pub(super) const SCHEMA: &[Field] = &[
    field("n", Kind::IntList, "60,1000,2048,2048,10000", "sample size per cell"),
    field("d", Kind::IntList, "10,500,1024,256,10", "dimension per cell"),
    field("trials", Kind::IntList, "2000,2000,200,200,200", "trials per cell"),
    field("sigma2", Kind::Float, "0.5", "noise variance"),
    field("highprob_k", Kind::Float, "20", "constant of the summarized high-probability form"),
    field("mean_se", Kind::Float, "4", "allowed distance of the sample mean from the closed form, in standard errors"),
    field("limit_rtol", Kind::Float, "0.02", "allowed relative distance of the sample mean from σ²/(1−γ)"),
    field("dispersion_rtol", Kind::Float, "0.25", "allowed relative distance of n·Var/σ⁴ from 2γ/(1−γ)³"),
    field("dispersion_min_d", Kind::Int, "100", "smallest d at which the dispersion limit is checked"),
];

pub(super) const QUANTITIES: &[&str] = &[
    "loss",
    "train",
    "highprob_bound",
    "highprob_summarized",
    "ols_lower",
    "ols_upper",
    "ols_explicit_lower",
    "ols_explicit_upper",
    "low_complexity",
];

type Coverage = fn(&Outcome) -> Option<bool>;

#[derive(Default)]
struct Outcome {
    rows: Vec<Row>,
    loss: f64,
    /// None when the bound does not apply at this cell.
    highprob: Option<bool>,
    highprob_summarized: Option<bool>,
    interval: Option<bool>,
    interval_explicit: Option<bool>,
    low_complexity: Option<bool>,
}

/// Loss-scale endpoints σ² + lo₊², σ² + hi² of an interval on √(L − σ²).
fn loss_interval(r: &BoundReport, s2: f64) -> (f64, f64) {
    let (lo, hi) = r.interval().expect("two-sided");
    (s2 + lo.max(0.0).powi(2), s2 + hi * hi)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(ResultTable, Summary)> {
    let (ns, ds, ts) = (cfg.usize_list("n"), cfg.usize_list("d"), cfg.usize_list("trials"));
    if ns.len() != ds.len() || ns.len() != ts.len() {
        return Err(Error::Config("keys `n`, `d` and `trials` must have the same length".into()));
    }
    let (s2, delta, k) = (cfg.f64("sigma2"), cfg.delta(), cfg.f64("highprob_k"));
    let sigma = s2.sqrt();
    let mut table = ResultTable::new("ols_moments");
    let mut summary = Summary::new("ols_moments");

    for (cell, ((&n, &d), &trials)) in ns.iter().zip(&ds).zip(&ts).enumerate() {
        if d == 0 || n < d + 4 {
            log::warn!("ols_moments: skipping cell (n = {n}, d = {d}); need 1 ≤ d ≤ n − 4");
            continue;
        }
        let gamma = d as f64 / n as f64;
        let mut w = Array1::zeros(d);
        w[0] = 1.0;
        let problem = Arc::new(RegressionProblem::new(sigma, w, CovarianceSpec::identity(d))?);
        let hp = ols_highprob_deviation(gamma, n, delta, s2, k)?;
        let p = ols_lowcomplexity_p(d, delta);
        let lc = if p / (n as f64) <= 0.999 { Some(low_complexity_bound(p, n, s2, delta)?) } else { None };
        let lc = lc.filter(|b| b.applicable);
        let summarized_bound = s2 / (1.0 - gamma) + hp.summarized;

        let outs = par_trials(trials, |t| {
            let data = sample_dataset(&problem, n, trial_seed(cfg.seed(), &format!("ols_moments/{n}x{d}"), t))?;
            let fit = least_squares_minnorm(&data)?;
            let train = fit.diagnostics.objective;
            let loss = problem.population_loss(fit.w.view())?;
            let summ = ols_interval(train, gamma, n, delta, s2)?;
            let expl = ols_interval_explicit(train, gamma, n, delta, s2)?;
            let (slo, shi) = loss_interval(&summ, s2);
            let (elo, ehi) = if expl.applicable { loss_interval(&expl, s2) } else { (f64::NAN, f64::NAN) };
            let mut sink = RowSink::new(t, "cell", cell as f64);
            sink.put("loss", loss)
                .put("train", train)
                .put("highprob_bound", if hp.applicable { hp.loss_bound(s2) } else { f64::NAN })
                .put("highprob_summarized", summarized_bound)
                .put("ols_lower", slo)
                .put("ols_upper", shi)
                .put("ols_explicit_lower", elo)
                .put("ols_explicit_upper", ehi)
                .put("low_complexity", lc.as_ref().map_or(f64::NAN, |b| s2 + b.value));
            Ok(Outcome {
                rows: sink.rows,
                loss,
                highprob: hp.applicable.then(|| loss <= hp.loss_bound(s2)),
                highprob_summarized: Some(loss <= summarized_bound),
                interval: Some(loss >= slo && loss <= shi),
                interval_explicit: expl.applicable.then_some(loss >= elo && loss <= ehi),
                low_complexity: lc.as_ref().map(|b| loss - s2 <= b.value),
            })
        })?;

        let tag = format!("n={n},d={d}");
        let losses: Vec<f64> = outs.iter().map(|o| o.loss).collect();
        let (m, se) = (mean(&losses), std_error(&losses));
        let (exact_mean, exact_var) = ols_exact_moments(n, d, s2)?;
        summary.within(format!("mean_vs_exact[{tag}]"), exact_mean, m, cfg.f64("mean_se") * se);
        let lim = s2 / (1.0 - gamma);
        summary.within(format!("mean_vs_limit[{tag}]"), lim, m, cfg.f64("limit_rtol") * lim);
        if trials >= 2 {
            let v = variance(&losses);
            summary.within(
                format!("variance_vs_exact[{tag}]"),
                exact_var,
                v,
                cfg.f64("mean_se") * variance_std_error(&losses),
            );
            if d >= cfg.usize("dispersion_min_d") {
                let target = 2.0 * gamma / (1.0 - gamma).powi(3);
                let observed = n as f64 * v / (s2 * s2);
                summary.within(format!("dispersion[{tag}]"), target, observed, cfg.f64("dispersion_rtol") * target);
            }
        }
        let coverage: [(&str, Coverage); 5] = [
            ("highprob", |o| o.highprob),
            ("highprob_summarized", |o| o.highprob_summarized),
            ("ols_interval_summarized", |o| o.interval),
            ("ols_interval", |o| o.interval_explicit),
            ("low_complexity", |o| o.low_complexity),
        ];
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
