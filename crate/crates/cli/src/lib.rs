//! Command-line front end for the `priorsens` experiments.
//!
//! `simulate <experiment> [--config file.toml] [flags]` runs one experiment
//! and writes its CSV artifacts into the output directory. Exit codes: 0 on
//! success, 1 on configuration errors, 2 on runtime failures.

pub mod config;
pub mod experiments;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::ExperimentConfig;
pub use experiments::Experiment;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<priorsens::Error> for CliError {
    fn from(e: priorsens::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Bayesian bandit prior-sensitivity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measured reward gap against the sensitivity bound over an eps x H grid.
    Sensitivity(Flags),
    /// Trajectory TV and reward gap on the worst-case instances.
    Lowerbound(Flags),
    /// Explore-then-commit meta-learning on the Gaussian bandit preset.
    MetaGaussian(Flags),
    /// Explore-then-commit meta-learning on the linear contextual preset.
    MetaLincb(Flags),
    /// Explore-then-commit meta-learning on the discrete preset, TS and KG.
    MetaDiscrete(Flags),
    /// Fit the preset's prior from exploration episodes only.
    Estimate(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Defaults to the config file, then SIM_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "out")]
    out_dir: Option<PathBuf>,
    /// Replicate worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    eps_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    horizon_grid: Option<Vec<usize>>,
    #[arg(long = "episodes")]
    num_episodes: Option<usize>,
    /// Comma-separated exploration lengths.
    #[arg(long = "explore", value_delimiter = ',')]
    explore_episodes: Option<Vec<usize>>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// ts, kts or rhc2.
    #[arg(long)]
    base_policy: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    #[arg(long)]
    random_ties: bool,
}

impl Flags {
    fn overrides(&self) -> ExperimentConfig {
        ExperimentConfig {
            out_dir: self.out_dir.clone(),
            seed: self.seed,
            jobs: self.jobs,
            preset: self.preset.clone(),
            eps: self.eps,
            horizon: self.horizon,
            k: self.k,
            eps_grid: self.eps_grid.clone(),
            horizon_grid: self.horizon_grid.clone(),
            num_episodes: self.num_episodes,
            explore_episodes: self.explore_episodes.clone(),
            replicates: self.replicates,
            trials: self.trials,
            base_policy: self.base_policy.clone(),
            alpha: self.alpha,
            k1: self.k1,
            k2: self.k2,
            random_ties: self.random_ties.then_some(true),
            experiment: None,
        }
    }
}

/// Parses `argv`, runs the experiment and returns its summary line.
pub fn run(argv: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> Result<String, CliError> {
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let msg = e.to_string();
        CliError::Config(msg.strip_prefix("error: ").unwrap_or(&msg).trim_end().to_string())
    })?;
    let (exp, flags) = match &cli.command {
        Command::Sensitivity(f) => (Experiment::Sensitivity, f),
        Command::Lowerbound(f) => (Experiment::LowerBound, f),
        Command::MetaGaussian(f) => (Experiment::MetaGaussian, f),
        Command::MetaLincb(f) => (Experiment::MetaLinCb, f),
        Command::MetaDiscrete(f) => (Experiment::MetaDiscrete, f),
        Command::Estimate(f) => (Experiment::Estimate, f),
    };
    let file = match &flags.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(name) = &file.experiment {
        if name != exp.name() {
            return Err(CliError::Config(format!(
                "`experiment` in config is {name:?} but the subcommand is {:?}",
                exp.name()
            )));
        }
    }
    let config = file.clone().merge(flags.overrides());
    let env_seed = std::env::var("SIM_SEED").ok();
    let seed = config::resolve_seed(flags.seed, file.seed, env_seed.as_deref())?;
    let ctx = experiments::Run {
        config: &config,
        seed,
        out_dir: experiments::out_dir(&config),
    };
    experiments::run(exp, &ctx)
}

/// Process entry point: prints the summary or error and returns the exit
/// code.
pub fn run_cli(argv: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Err(e) = Cli::try_parse_from(&argv) {
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            return 0;
        }
    }
    match run(argv) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("simulate: {e}");
            e.exit_code()
        }
    }
}
