//! `fracheat` — configuration, orchestration, and reproducible artifact
//! output for kernel evaluation, noise validation, SPDE simulation, scaling
//! estimation, and the numerical verification suite.
//!
//! Exit codes: 0 = success with all checks passing, 1 = a check failed,
//! 2 = configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "fracheat", version, about = "Fractional stochastic heat equation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate kernel tables and closed-form identity records.
    Kernel(CommonArgs),
    /// Sample noise increments and validate their covariance.
    Noise(CommonArgs),
    /// Integrate an ensemble of paths and write snapshots.
    Simulate(CommonArgs),
    /// Simulate, estimate structure functions, fit exponents, and compare
    /// against the theorem bounds and the additive-noise oracle.
    Estimate(CommonArgs),
    /// Run the full numerical verification suite.
    Verify(CommonArgs),
    /// Merge completed run directories into one summary.
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Path-count override.
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Completed run directories.
    run_dirs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors that must map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<fracheat_core::Error> for ConfigError {
    fn from(e: fracheat_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        ConfigError(format!("i/o: {e}"))
    }
}

pub enum Outcome {
    AllPassed,
    CheckFailed(String),
}

fn load_config(args: &CommonArgs, subcommand: &str) -> Result<(RunConfig, PathBuf), ConfigError> {
    let mut cfg: RunConfig = match &args.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| ConfigError(format!("malformed config {}: {e}", path.display())))?
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed_base = Some(seed);
    } else if cfg.seed_base.is_none() {
        cfg.seed_base = Some(config::DEFAULT_SEED);
    }
    if let Some(paths) = args.paths {
        cfg.solver.path_count = paths;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(format!("fracheat-out-{subcommand}")));
    cfg.out_dir = Some(out.clone());
    std::fs::create_dir_all(&out)
        .map_err(|e| ConfigError(format!("cannot create output directory {}: {e}", out.display())))?;
    Ok((cfg, out))
}

fn dispatch() -> Result<Outcome, ConfigError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Kernel(a) => {
            let (cfg, out) = load_config(a, "kernel")?;
            commands::kernel(&cfg, &out)
        }
        Command::Noise(a) => {
            let (cfg, out) = load_config(a, "noise")?;
            commands::noise(&cfg, &out)
        }
        Command::Simulate(a) => {
            let (cfg, out) = load_config(a, "simulate")?;
            commands::simulate(&cfg, &out)
        }
        Command::Estimate(a) => {
            let (cfg, out) = load_config(a, "estimate")?;
            commands::estimate(&cfg, &out)
        }
        Command::Verify(a) => {
            let (cfg, out) = load_config(a, "verify")?;
            commands::verify(&cfg, &out)
        }
        Command::Report(a) => {
            let out = a
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("fracheat-report"));
            std::fs::create_dir_all(&out)
                .map_err(|e| ConfigError(format!("cannot create {}: {e}", out.display())))?;
            commands::report(&a.run_dirs, &out)
        }
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(Outcome::AllPassed) => ExitCode::from(0),
        Ok(Outcome::CheckFailed(what)) => {
            eprintln!("check failed: {what}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
    }
}
