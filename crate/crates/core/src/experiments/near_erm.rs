//! Training and population gaps of the near-ERM family w_α across n.

use std::sync::Arc;

use ndarray::Array1;

use super::config::{field, Field, Kind};
use super::stats::{loglog_slope, mean};
use super::{par_trials, trial_seed, ExperimentConfig, ResultTable, RowSink, Summary};
use crate::error::{Error, Result};
use crate::estimators::near_erm_family;
use crate::model::{sample_dataset, CovarianceSpec, RegressionProblem};

pub(super) const SCHEMA: &[Field] = &[
    field("n", Kind::IntList, "512,1024,2048,4096,8192,16384", "sample sizes"),
    field("trials", Kind::IntList, "32,16,8,4,2,1", "trials per sample size"),
    field("gamma", Kind::Float, "0.5", "d/n"),
    field("c", Kind::Float, "1", "scale of α − 1"),
    field("sigma2", Kind::Float, "0.5", "noise variance"),
    field("pop_slope", Kind::FloatList, "-0.35,-0.15", "allowed range of the population-gap slope"),
    field("train_slope", Kind::FloatList, "-0.6,-0.4", "allowed range of the training-gap slope"),
];

pub(super) const QUANTITIES: &[&str] = &["train_gap", "pop_gap", "train_gap_identity", "alpha"];

fn range(cfg: &ExperimentConfig, key: &str) -> Result<(f64, f64)> {
    match cfg.f64_list(key)[..] {
        [lo, hi] if lo <= hi => Ok((lo, hi)),
        _ => Err(Error::Config(format!("key `{key}` must hold two increasing values"))),
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(ResultTable, Summary)> {
    let (ns, ts) = (cfg.usize_list("n"), cfg.usize_list("trials"));
    if ns.len() != ts.len() {
        return Err(Error::Config("keys `n` and `trials` must have the same length".into()));
    }
    let (gamma, c, s2) = (cfg.f64("gamma"), cfg.f64("c"), cfg.f64("sigma2"));
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Config(format!("key `gamma` must lie in (0, 1), got {gamma}")));
    }
    let (pop_lo, pop_hi) = range(cfg, "pop_slope")?;
    let (tr_lo, tr_hi) = range(cfg, "train_slope")?;

    let mut table = ResultTable::new("near_erm");
    let mut summary = Summary::new("near_erm");
    let (mut xs, mut pop, mut train) = (Vec::new(), Vec::new(), Vec::new());
    for (&n, &trials) in ns.iter().zip(&ts) {
        let d = ((gamma * n as f64).round() as usize).clamp(1, n - 1);
        let mut w = Array1::zeros(d);
        w[0] = 1.0;
        let problem = Arc::new(RegressionProblem::new(s2.sqrt(), w, CovarianceSpec::identity(d))?);
        let outs = par_trials(trials, |t| {
            let data = sample_dataset(&problem, n, trial_seed(cfg.seed(), &format!("near_erm/{n}"), t))?;
            let fam = near_erm_family(&data, c)?;
            let mut sink = RowSink::new(t, "n", n as f64);
            sink.put("train_gap", fam.train_gap)
                .put("pop_gap", fam.pop_gap)
                .put("train_gap_identity", fam.train_gap_identity)
                .put("alpha", fam.alpha);
            Ok((sink.rows, fam.train_gap, fam.pop_gap))
        })?;
        xs.push(n as f64);
        train.push(mean(&outs.iter().map(|o| o.1).collect::<Vec<_>>()));
        pop.push(mean(&outs.iter().map(|o| o.2).collect::<Vec<_>>()));
        for o in outs {
            table.extend(o.0);
        }
    }
    if c == 0.0 {
        let worst = train.iter().chain(&pop).fold(0.0f64, |m, v| m.max(v.abs()));
        summary.within("zero_gaps", 0.0, worst, 1e-12);
    } else if xs.len() >= 2 {
        summary.in_range("pop_gap_slope", pop_lo, pop_hi, loglog_slope(&xs, &pop));
        summary.in_range("train_gap_slope", tr_lo, tr_hi, loglog_slope(&xs, &train));
    }
    Ok((table, summary))
}
