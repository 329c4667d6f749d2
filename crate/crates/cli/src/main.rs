use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use optrate_core::experiments::{self, acceptance, parse_override, ConfigFile, ExperimentConfig, Scenario};

/// Monte Carlo scenarios for optimistic-rate generalization bounds in
/// Gaussian linear regression.
#[derive(Debug, Parser)]
#[command(name = "optrate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ridge path under a spiked covariance.
    Flatness(RunArgs),
    /// Min-norm least squares across aspect ratios.
    DoubleDescent(RunArgs),
    /// Moments of the OLS risk and coverage of the OLS bounds.
    OlsMoments(RunArgs),
    /// ℓ1-constrained ERM: exact recovery and bound coverage.
    Lasso(RunArgs),
    /// Training and population gaps of the near-ERM family.
    NearErm(RunArgs),
    /// Summary functionals ψ± against Monte Carlo ERM.
    LocalGw(RunArgs),
    /// Run the acceptance suite and exit 2 if any criterion fails.
    VerifyAll(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file with `key = value` lines under `[scenario]` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value`, applied after the config file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

const SUBCOMMANDS: &str = "flatness, double-descent, ols-moments, lasso, near-erm, local-gw, verify-all";

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("OPTRATE_THREADS") {
        let n: usize = v.parse().with_context(|| format!("OPTRATE_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn resolve(scenario: Scenario, args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let file = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read config `{}`", p.display()))?;
            Some(ConfigFile::parse(&text).with_context(|| format!("in config `{}`", p.display()))?)
        }
        None => None,
    };
    let mut overrides = args.overrides.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    Ok(ExperimentConfig::resolve(scenario, file.as_ref(), &overrides)?)
}

fn run_one(scenario: Scenario, args: &RunArgs) -> anyhow::Result<()> {
    let cfg = resolve(scenario, args)?;
    let out = experiments::run(&cfg)?;
    let files = experiments::write_outputs(&out, &args.out)?;
    for c in &out.summary.checks {
        println!(
            "{} {} observed {:.6} nominal {:.6}",
            if c.pass { "pass" } else { "fail" },
            c.name,
            c.observed,
            c.nominal
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn verify_all(args: &RunArgs) -> anyhow::Result<bool> {
    if args.config.is_some() || !args.overrides.is_empty() {
        bail!("verify-all runs fixed configurations; only --seed and --out are accepted");
    }
    let seed = args.seed.unwrap_or(0);
    let mut outputs = Vec::new();
    for r in acceptance::runs() {
        let cfg = acceptance::config_for(&r, seed)?;
        eprintln!("running {} ({})", r.label, r.scenario.name());
        let out = experiments::run(&cfg)?;
        experiments::write_outputs(&out, &args.out.join(r.label))?;
        outputs.push((r.label, out));
    }
    let results = acceptance::evaluate(&outputs);
    for r in &results {
        println!("{}", r.line());
    }
    let path = args.out.join("acceptance_summary.json");
    acceptance::write_results(&results, &path)?;
    println!("wrote {}", path.display());
    Ok(results.iter().all(|r| r.pass))
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("usage: optrate <SUBCOMMAND> [--config PATH] [--override KEY=VALUE]... [--seed N] [--out DIR]");
    eprintln!("valid subcommands: {SUBCOMMANDS}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("valid subcommands: {SUBCOMMANDS}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = init_threads() {
        return usage_error(format!("{e:#}"));
    }
    let (scenario, args) = match &cli.command {
        Command::Flatness(a) => (Some(Scenario::Flatness), a),
        Command::DoubleDescent(a) => (Some(Scenario::DoubleDescent), a),
        Command::OlsMoments(a) => (Some(Scenario::OlsMoments), a),
        Command::Lasso(a) => (Some(Scenario::Lasso), a),
        Command::NearErm(a) => (Some(Scenario::NearErm), a),
        Command::LocalGw(a) => (Some(Scenario::LocalGw), a),
        Command::VerifyAll(a) => (None, a),
    };
    if let Some(p) = args.config.as_deref().filter(|p| !Path::new(p).exists()) {
        return usage_error(format!("config file `{}` not found", p.display()));
    }
    match scenario {
        Some(s) => match run_one(s, args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => usage_error(format!("{e:#}")),
        },
        None => match verify_all(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(2),
            Err(e) => usage_error(format!("{e:#}")),
        },
    }
}
