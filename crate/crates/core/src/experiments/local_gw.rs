//! Local Gaussian width theory: the summary functionals ψ± against Monte
//! Carlo ERM training error and distance to w*.

use std::sync::Arc;

use ndarray::Array1;

use super::config::{field, Field, Kind};
use super::stats::allowed_failure_rate;
use super::{par_trials, trial_seed, ExperimentConfig, ResultTable, Row, RowSink, Summary};
use crate::bounds::{default_r_max, psi_localize, psi_minimize, Sign, SummaryFunctional};
use crate::error::{Error, Result};
use crate::estimators::{l2_constrained_erm, least_squares_minnorm};
use crate::model::{sample_dataset, CovarianceSpec, RegressionProblem};
use crate::widths::{FullSpaceWidth, IsotropicBallWidth, LocalizedWidth};

pub(super) const SCHEMA: &[Field] = &[
    field("n", Kind::Int, "2048", "sample size"),
    field("gamma", Kind::Float, "0.5", "d/n"),
    field("sigma2", Kind::Float, "0.5", "noise variance"),
    field("wstar_norm", Kind::Float, "1", "‖w*‖₂"),
    field("trials", Kind::Int, "200", "number of trials"),
    field("set", Kind::Str, "full_space", "full_space or l2_ball"),
    field("radius", Kind::Float, "2", "radius of the ℓ2 ball"),
    field("width", Kind::Str, "closed_form", "closed_form or monte_carlo (full space only)"),
    field("mc_samples", Kind::Int, "2000", "Monte Carlo samples for the width"),
    field("c", Kind::Float, "1.4142135623730951", "constant C in ψ±"),
    field("mu_margin", Kind::Float, "0.01", "μ = max(μ* + margin, √L̂)"),
    field("rstar_rtol", Kind::Float, "0.02", "allowed relative error of r* against √(σ²γ/(1−γ))"),
];

pub(super) const QUANTITIES: &[&str] = &["train_rmse", "distance", "mu_star", "mu", "r_minus", "r_plus", "contained"];

struct Outcome {
    rows: Vec<Row>,
    below_mu_star: bool,
    contained: bool,
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(ResultTable, Summary)> {
    let n = cfg.usize("n");
    let (gamma, s2, a, delta, trials) =
        (cfg.f64("gamma"), cfg.f64("sigma2"), cfg.f64("wstar_norm"), cfg.delta(), cfg.usize("trials"));
    let d = ((gamma * n as f64).round() as usize).max(1);
    let gamma = d as f64 / n as f64;
    let sigma = s2.sqrt();
    let mut wstar = Array1::zeros(d);
    wstar[0] = a;
    let cov = CovarianceSpec::identity(d);
    let problem = Arc::new(RegressionProblem::new(sigma, wstar, cov.clone())?);
    let seed = trial_seed(cfg.seed(), "local_gw/width", 0);
    let ball = match cfg.str("set") {
        "full_space" => None,
        "l2_ball" => Some(cfg.f64("radius")),
        s => return Err(Error::Config(format!("key `set` expects full_space or l2_ball, got `{s}`"))),
    };
    let (width, r_max): (Arc<dyn LocalizedWidth>, f64) = match ball {
        None => {
            let w = match cfg.str("width") {
                "closed_form" => FullSpaceWidth::closed_form(&cov),
                "monte_carlo" => FullSpaceWidth::monte_carlo(&cov, cfg.usize("mc_samples"), seed)?,
                s => return Err(Error::Config(format!("key `width` expects closed_form or monte_carlo, got `{s}`"))),
            };
            (Arc::new(w), default_r_max(sigma, a))
        }
        Some(b) => {
            let w = IsotropicBallWidth::new(b, a, d, cfg.usize("mc_samples"), seed)?;
            let r_max = w.max_radius().expect("bounded set");
            (Arc::new(w), r_max)
        }
    };
    if gamma >= 1.0 && ball.is_none() {
        return Err(Error::Config("the full-space scenario needs d < n".into()));
    }
    let mut f_plus = SummaryFunctional::new(Sign::Plus, delta, sigma, n, width.clone())?;
    f_plus.c = cfg.f64("c");
    let f_minus = f_plus.with_sign(Sign::Minus);
    let min = psi_minimize(&f_plus, r_max)?;

    let outs = par_trials(trials, |t| {
        let data = sample_dataset(&problem, n, trial_seed(cfg.seed(), "local_gw", t))?;
        let fit = match ball {
            None => least_squares_minnorm(&data)?,
            Some(b) => l2_constrained_erm(&data, b)?,
        };
        let rmse = fit.diagnostics.objective.sqrt();
        let dist = problem.excess_risk(fit.w.view())?.sqrt();
        let mu = (min.mu_star + cfg.f64("mu_margin")).max(rmse);
        let loc = psi_localize(&f_plus, &f_minus, mu, r_max)?;
        let iv = loc.interval;
        let contained = !iv.empty && dist >= iv.r_minus && dist <= iv.r_plus;
        let mut sink = RowSink::new(t, "n", n as f64);
        sink.put("train_rmse", rmse)
            .put("distance", dist)
            .put("mu_star", min.mu_star)
            .put("mu", mu)
            .put("r_minus", iv.r_minus)
            .put("r_plus", iv.r_plus)
            .put("contained", if contained { 1.0 } else { 0.0 });
        Ok(Outcome { rows: sink.rows, below_mu_star: rmse <= min.mu_star, contained })
    })?;

    let mut summary = Summary::new("local_gw");
    if ball.is_none() {
        let lim = SummaryFunctional::limiting(Sign::Plus, sigma, n, width.clone())?;
        let r_star = psi_minimize(&lim, r_max)?.r_star;
        let target = (s2 * gamma / (1.0 - gamma)).sqrt();
        summary.within("r_star", target, r_star, cfg.f64("rstar_rtol") * target);
    }
    let rate = |f: fn(&Outcome) -> bool| outs.iter().filter(|o| !f(o)).count() as f64 / trials as f64;
    summary.at_most("train_above_mu_star_rate", allowed_failure_rate(trials, delta), rate(|o| o.below_mu_star));
    summary.at_most("containment_failure_rate", allowed_failure_rate(trials, 4.0 * delta), rate(|o| o.contained));

    let mut table = ResultTable::new("local_gw");
    for o in outs {
        table.extend(o.rows);
    }
    Ok((table, summary))
}
