//! Ridge path under a spiked covariance: loss, training error, the
//! covariance-splitting bound and the norm threshold per λ.

use std::sync::Arc;

use ndarray::Array1;

use super::config::{field, Field, Kind};
use super::stats::{allowed_failure_rate, mean};
use super::{par_trials, trial_seed, ExperimentConfig, ResultTable, Row, RowSink, Summary};
use crate::bounds::{c_functional, cov_split_bound, flatness_bound, SplitContext};
use crate::error::{Error, Result};
use crate::estimators::SpectralRidge;
use crate::model::{sample_dataset, CovarianceSpec, RegressionProblem};
use crate::widths::{ConstraintSet, SetKind};

pub(super) const SCHEMA: &[Field] = &[
    field("n", Kind::Int, "200", "sample size"),
    field("aspect", Kind::Int, "20", "d/n"),
    field("alpha", Kind::Float, "0.05", "standard deviation of the tail coordinates"),
    field("sigma2", Kind::Float, "0.5", "noise variance"),
    field("trials", Kind::Int, "10", "number of trials"),
    field("log10_lambda_min", Kind::Float, "-8", "smallest log10 λ"),
    field("log10_lambda_max", Kind::Float, "2", "largest log10 λ"),
    field("lambda_points", Kind::Int, "41", "grid size"),
    field("split_rank", Kind::Int, "1", "dimension of Σ₁"),
    field("mc_samples", Kind::Int, "2000", "Monte Carlo samples for the width of Σ₂"),
    field("large_scale", Kind::Bool, "false", "use n = 600"),
    field("spread_tol", Kind::Float, "0.1", "allowed relative spread of the loss past the threshold"),
];

pub(super) const QUANTITIES: &[&str] =
    &["train", "loss", "bound", "norm", "capacity", "capacity_star", "null", "bayes"];

fn lambda_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let (lo, hi, m) = (cfg.f64("log10_lambda_min"), cfg.f64("log10_lambda_max"), cfg.usize("lambda_points"));
    if m < 2 || !(hi > lo) {
        return Err(Error::Config("λ grid needs at least 2 points and log10_lambda_max > log10_lambda_min".into()));
    }
    Ok((0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect())
}

struct TrialOut {
    rows: Vec<Row>,
    cov_split_fail: bool,
    flatness_fail: bool,
    c_minnorm: f64,
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(ResultTable, Summary)> {
    let n = if cfg.bool("large_scale") { 600 } else { cfg.usize("n") };
    let d = n * cfg.usize("aspect");
    let (alpha, s2, delta, trials) = (cfg.f64("alpha"), cfg.f64("sigma2"), cfg.delta(), cfg.usize("trials"));
    if d <= n || d < 2 {
        return Err(Error::Config("flatness needs aspect ≥ 2".into()));
    }
    let sigma = s2.sqrt();
    let cov = CovarianceSpec::spiked(Array1::ones(1), alpha, d - 1)?;
    let mut wstar = Array1::zeros(d);
    wstar[0] = 1.0;
    let ws_norm = 1.0;
    let problem = Arc::new(RegressionProblem::new(sigma, wstar.clone(), cov.clone())?);
    let split = cov.split(cfg.usize("split_rank"))?;
    let ctx = SplitContext::new(
        split,
        SetKind::L2Ball,
        wstar.view(),
        cfg.usize("mc_samples"),
        trial_seed(cfg.seed(), "flatness/width", 0),
    )?;
    let beta2 = ctx.beta2(n, delta);
    let c_star = c_functional(ws_norm, &ctx, n, delta)?;
    let trace = cov.trace();
    let null = problem.null_loss();
    let grid = lambda_grid(cfg)?;

    let outs = par_trials(trials, |t| {
        let data = sample_dataset(&problem, n, trial_seed(cfg.seed(), "flatness", t))?;
        let sr = SpectralRidge::new(&data)?;
        let mut sink = RowSink::new(t, "log10_lambda", 0.0);
        let mut cov_split_fail = false;
        let mut path = Vec::with_capacity(grid.len());
        for &x in &grid {
            let lambda = 10f64.powf(x);
            let w = sr.solve(lambda);
            let norm = w.dot(&w).sqrt();
            let train = sr.train_loss(lambda);
            let loss = problem.population_loss(w.view())?;
            let bound = cov_split_bound(train, ConstraintSet::l2_ball(1.0), &ctx, n, delta, norm)?;
            cov_split_fail |= loss > bound.value;
            path.push((x, norm, loss));
            sink.at(x)
                .put("train", train)
                .put("loss", loss)
                .put("bound", bound.value)
                .put("norm", norm)
                .put("capacity", norm * norm * trace / n as f64)
                .put("capacity_star", ws_norm * ws_norm * trace / n as f64)
                .put("null", null)
                .put("bayes", s2);
        }
        // the norm grows as λ shrinks
        let crossing =
            path.windows(2).find(|p| p[1].1 >= ws_norm && p[0].1 < ws_norm || p[0].1 >= ws_norm && p[1].1 < ws_norm);
        if let Some(p) = crossing {
            let (x0, n0, _) = p[0];
            let (x1, n1, _) = p[1];
            let x = x0 + (ws_norm - n0) * (x1 - x0) / (n1 - n0);
            sink.at(x).put("threshold", ws_norm);
        }

        let w_mn = sr.solve(0.0);
        let mn_norm = w_mn.dot(&w_mn).sqrt();
        let c_minnorm = c_functional(mn_norm, &ctx, n, delta)?;
        sink.at(f64::NEG_INFINITY).put("c_minnorm", c_minnorm);
        let emp_star = data.empirical_loss(wstar.view())?;
        let eps = [(emp_star.sqrt() / sigma - 1.0), c_star, (c_minnorm - sigma) / (1.0 + sigma), 0.0]
            .into_iter()
            .fold(0.0f64, f64::max);
        let flat = flatness_bound(sigma, eps, beta2)?;
        let flatness_fail = path.iter().any(|&(_, nm, loss)| nm >= ws_norm && loss > flat);
        Ok(TrialOut { rows: sink.rows, cov_split_fail, flatness_fail, c_minnorm })
    })?;

    let mut table = ResultTable::new("flatness");
    let mut summary = Summary::new("flatness");

    // loss and norm averaged over trials at each λ
    let m = grid.len();
    let mut mean_loss = vec![0.0; m];
    let mut mean_norm = vec![0.0; m];
    for o in &outs {
        for r in &o.rows {
            if let Some(i) = grid.iter().position(|&x| x == r.x_value) {
                match r.quantity {
                    "loss" => mean_loss[i] += r.value / trials as f64,
                    "norm" => mean_norm[i] += r.value / trials as f64,
                    _ => {}
                }
            }
        }
    }
    let past: Vec<f64> = (0..m).filter(|&i| mean_norm[i] > ws_norm).map(|i| mean_loss[i]).collect();
    let spread = if past.is_empty() {
        f64::INFINITY
    } else {
        let lo = past.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = past.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / lo
    };
    summary.at_most("flatness_spread", cfg.f64("spread_tol"), spread);

    let rate = |f: &dyn Fn(&TrialOut) -> bool| outs.iter().filter(|o| f(o)).count() as f64 / trials as f64;
    summary.at_most("cov_split_failure_rate", allowed_failure_rate(trials, delta), rate(&|o| o.cov_split_fail));
    summary.at_most(
        "flatness_bound_failure_rate",
        allowed_failure_rate(trials, 2.0 * delta),
        rate(&|o| o.flatness_fail),
    );
    let cm = mean(&outs.iter().map(|o| o.c_minnorm).collect::<Vec<_>>());
    summary.within("c_minnorm_near_sigma", sigma, cm, 0.15 * sigma);
    summary.at_most("cov_split_beta2", 1.0, beta2);

    for o in outs {
        table.extend(o.rows);
    }
    Ok((table, summary))
}
