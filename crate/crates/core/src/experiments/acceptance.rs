//! The Monte Carlo acceptance suite: a fixed set of scenario runs and the
//! criteria evaluated on their summaries.

use std::path::Path;

use serde::Serialize;

use super::{run, to_json, Check, ExperimentConfig, Scenario, ScenarioOutput};
use crate::error::Result;

/// One scenario run of the suite, identified by `label`.
#[derive(Clone, Debug)]
pub struct AcceptanceRun {
    pub label: &'static str,
    pub scenario: Scenario,
    pub overrides: Vec<(String, String)>,
}

fn acc_run(label: &'static str, scenario: Scenario, overrides: &[(&str, &str)]) -> AcceptanceRun {
    let overrides = overrides.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    AcceptanceRun { label, scenario, overrides }
}

pub fn runs() -> Vec<AcceptanceRun> {
    vec![
        acc_run("ols_moments", Scenario::OlsMoments, &[]),
        acc_run("double_descent", Scenario::DoubleDescent, &[("ratios", "2"), ("trials", "30")]),
        acc_run("interp_coverage", Scenario::DoubleDescent, &[("ratios", "2"), ("n", "512"), ("trials", "200")]),
        acc_run("flatness", Scenario::Flatness, &[("trials", "200")]),
        acc_run("lasso", Scenario::Lasso, &[]),
        acc_run("near_erm", Scenario::NearErm, &[]),
        acc_run("local_gw", Scenario::LocalGw, &[]),
    ]
}

/// Checks of run `label` whose name equals `check` or starts with `check[`.
struct Selector {
    label: &'static str,
    check: &'static str,
}

const fn sel(label: &'static str, check: &'static str) -> Selector {
    Selector { label, check }
}

struct Criterion {
    name: &'static str,
    selectors: &'static [Selector],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        name: "OLS proportional risk",
        selectors: &[
            sel("ols_moments", "mean_vs_limit[n=2048,d=1024]"),
            sel("ols_moments", "mean_vs_exact[n=2048,d=1024]"),
        ],
    },
    Criterion { name: "OLS dispersion", selectors: &[sel("ols_moments", "dispersion[n=1000,d=500]")] },
    Criterion {
        name: "Min-norm interpolation",
        selectors: &[sel("double_descent", "mean_loss[gamma=2]"), sel("double_descent", "mean_norm_sq[gamma=2]")],
    },
    Criterion {
        name: "Bound coverage",
        selectors: &[
            sel("flatness", "cov_split_failure_rate"),
            sel("ols_moments", "ols_interval_failure_rate"),
            sel("interp_coverage", "interp_interval_failure_rate"),
            sel("lasso", "lasso_compat_failure_rate"),
            sel("lasso", "lasso_fast_rate_failure_rate"),
            sel("ols_moments", "low_complexity_failure_rate"),
            sel("ols_moments", "highprob_failure_rate"),
            sel("local_gw", "containment_failure_rate"),
        ],
    },
    Criterion {
        name: "Flatness",
        selectors: &[sel("flatness", "flatness_spread"), sel("flatness", "cov_split_failure_rate")],
    },
    Criterion {
        name: "LASSO phase transition",
        selectors: &[sel("lasso", "recovery_rate"), sel("lasso", "recovery_failure_rate")],
    },
    Criterion {
        name: "Near-ERM rate separation",
        selectors: &[sel("near_erm", "pop_gap_slope"), sel("near_erm", "train_gap_slope")],
    },
    Criterion {
        name: "Local Gaussian width",
        selectors: &[sel("local_gw", "r_star"), sel("local_gw", "train_above_mu_star_rate")],
    },
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub name: &'static str,
    pub pass: bool,
    /// Matched checks, prefixed with the run label.
    pub checks: Vec<Check>,
    /// Selectors that matched no check.
    pub missing: Vec<String>,
}

impl CriterionResult {
    /// One line: verdict, name and the matched checks.
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let details: Vec<String> = self
            .checks
            .iter()
            .map(|c| format!("{}{} {:.4} vs {:.4}", if c.pass { "" } else { "!" }, c.name, c.observed, c.nominal))
            .chain(self.missing.iter().map(|m| format!("!{m} missing")))
            .collect();
        format!("{verdict} {}: {}", self.name, details.join("; "))
    }
}

/// Resolves the config of one run on top of the base seed and δ.
pub fn config_for(run: &AcceptanceRun, seed: u64) -> Result<ExperimentConfig> {
    let mut overrides = run.overrides.clone();
    overrides.push(("seed".into(), seed.to_string()));
    ExperimentConfig::resolve(run.scenario, None, &overrides)
}

/// Evaluates every criterion against labeled outputs.
pub fn evaluate(outputs: &[LabeledOutput]) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|c| {
            let mut checks = Vec::new();
            let mut missing = Vec::new();
            for s in c.selectors {
                let found: Vec<Check> = outputs
                    .iter()
                    .filter(|(label, _)| *label == s.label)
                    .flat_map(|(_, out)| out.summary.checks.iter())
                    .filter(|ch| {
                        ch.name == s.check || ch.name.strip_prefix(s.check).is_some_and(|r| r.starts_with('['))
                    })
                    .map(|ch| Check { name: format!("{}/{}", s.label, ch.name), ..ch.clone() })
                    .collect();
                if found.is_empty() {
                    missing.push(format!("{}/{}", s.label, s.check));
                }
                checks.extend(found);
            }
            let pass = missing.is_empty() && checks.iter().all(|ch| ch.pass);
            CriterionResult { name: c.name, pass, checks, missing }
        })
        .collect()
}

pub type LabeledOutput = (&'static str, ScenarioOutput);

/// Runs the whole suite.
pub fn run_all(seed: u64) -> Result<(Vec<LabeledOutput>, Vec<CriterionResult>)> {
    let mut outputs = Vec::new();
    for r in runs() {
        let cfg = config_for(&r, seed)?;
        outputs.push((r.label, run(&cfg)?));
    }
    let results = evaluate(&outputs);
    Ok((outputs, results))
}

/// Writes `{criteria: [{name, pass, checks, missing}]}` to `path`.
pub fn write_results(results: &[CriterionResult], path: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct Out<'a> {
        criteria: &'a [CriterionResult],
    }
    std::fs::write(path, to_json(&Out { criteria: results })?)?;
    Ok(())
}
