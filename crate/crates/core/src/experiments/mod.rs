//! Config-driven scenarios that reproduce the figures and check every bound
//! by Monte Carlo, writing flat CSV tables and JSON summaries.

pub mod acceptance;
mod config;
mod double_descent;
mod flatness;
mod lasso;
mod local_gw;
mod near_erm;
mod ols_moments;
pub mod stats;
mod table;

pub use config::{parse_override, parse_value, ConfigFile, ExperimentConfig, Field, Kind, Value, COMMON};
pub use double_descent::{limit_loss, limit_norm_sq};
pub use lasso::below_transition_n;
pub use table::{fmt_float, Check, ResultTable, Row, RowSink, Summary, CSV_HEADER};

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::rng::{child_seed, labeled_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Flatness,
    DoubleDescent,
    OlsMoments,
    Lasso,
    NearErm,
    LocalGw,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Flatness,
        Scenario::DoubleDescent,
        Scenario::OlsMoments,
        Scenario::Lasso,
        Scenario::NearErm,
        Scenario::LocalGw,
    ];

    /// Section name in config files and scenario column in CSVs.
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Flatness => "flatness",
            Scenario::DoubleDescent => "double_descent",
            Scenario::OlsMoments => "ols_moments",
            Scenario::Lasso => "lasso",
            Scenario::NearErm => "near_erm",
            Scenario::LocalGw => "local_gw",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let s = s.replace('-', "_");
        Scenario::ALL.into_iter().find(|sc| sc.name() == s)
    }

    pub fn names() -> Vec<&'static str> {
        Scenario::ALL.iter().map(|s| s.name()).collect()
    }

    pub fn schema(self) -> &'static [Field] {
        match self {
            Scenario::Flatness => flatness::SCHEMA,
            Scenario::DoubleDescent => double_descent::SCHEMA,
            Scenario::OlsMoments => ols_moments::SCHEMA,
            Scenario::Lasso => lasso::SCHEMA,
            Scenario::NearErm => near_erm::SCHEMA,
            Scenario::LocalGw => local_gw::SCHEMA,
        }
    }

    /// Quantities written for every trial at every grid point. Flatness
    /// adds one `threshold` and one `c_minnorm` row per trial.
    pub fn quantities(self) -> &'static [&'static str] {
        match self {
            Scenario::Flatness => flatness::QUANTITIES,
            Scenario::DoubleDescent => double_descent::QUANTITIES,
            Scenario::OlsMoments => ols_moments::QUANTITIES,
            Scenario::Lasso => lasso::QUANTITIES,
            Scenario::NearErm => near_erm::QUANTITIES,
            Scenario::LocalGw => local_gw::QUANTITIES,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub config: ExperimentConfig,
    pub table: ResultTable,
    pub summary: Summary,
}

pub fn run(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    log::info!("running {} (config {})", cfg.scenario.name(), cfg.hash());
    let (mut table, summary) = match cfg.scenario {
        Scenario::Flatness => flatness::run(cfg)?,
        Scenario::DoubleDescent => double_descent::run(cfg)?,
        Scenario::OlsMoments => ols_moments::run(cfg)?,
        Scenario::Lasso => lasso::run(cfg)?,
        Scenario::NearErm => near_erm::run(cfg)?,
        Scenario::LocalGw => local_gw::run(cfg)?,
    };
    table.sort();
    Ok(ScenarioOutput { config: cfg.clone(), table, summary })
}

/// Runs `f` for trials 1..=trials in parallel and concatenates the rows.
pub(crate) fn par_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (1..=trials as u64).into_par_iter().map(&f).collect()
}

/// Seed of trial `t` in the cell labeled `label`.
pub(crate) fn trial_seed(base: u64, label: &str, t: u64) -> u64 {
    child_seed(labeled_seed(base, label), t)
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: &'static str,
    version: &'static str,
    seed: u64,
    delta: f64,
    config_hash: String,
    config: &'a ExperimentConfig,
    rows: usize,
    files: Vec<String>,
}

/// Writes `<scenario>.csv`, `<scenario>_summary.json` and `<scenario>_manifest.json`.
pub fn write_outputs(out: &ScenarioOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = out.config.scenario.name();
    let csv_path = dir.join(format!("{name}.csv"));
    let summary_path = dir.join(format!("{name}_summary.json"));
    let manifest_path = dir.join(format!("{name}_manifest.json"));
    let meta = vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("scenario".to_string(), name.to_string()),
        ("config_hash".to_string(), out.config.hash()),
        ("seed".to_string(), out.config.seed().to_string()),
        ("timestamp".to_string(), timestamp()),
    ];
    let mut buf = Vec::new();
    out.table.write_csv(&mut buf, &meta)?;
    fs::write(&csv_path, buf)?;
    fs::write(&summary_path, to_json(&out.summary)?)?;
    let files = [&csv_path, &summary_path]
        .iter()
        .map(|p| p.file_name().expect("file").to_string_lossy().into_owned())
        .collect();
    let manifest = Manifest {
        scenario: name,
        version: env!("CARGO_PKG_VERSION"),
        seed: out.config.seed(),
        delta: out.config.delta(),
        config_hash: out.config.hash(),
        config: &out.config,
        rows: out.table.len(),
        files,
    };
    fs::write(&manifest_path, to_json(&manifest)?)?;
    Ok(vec![csv_path, summary_path, manifest_path])
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| crate::Error::Io(e.to_string()))
}

/// Seconds since the Unix epoch.
fn timestamp() -> String {
    let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
    format!("{}", now.as_secs())
}
