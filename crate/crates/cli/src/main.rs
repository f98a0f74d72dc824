//! `grn-eval`: batch front end for the evaluation engine.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments: exit code 2.
    Usage(String),
    /// Unreadable or invalid data: exit code 3.
    Data(String),
}

impl From<grn_eval::Error> for CliError {
    fn from(e: grn_eval::Error) -> Self {
        if e.is_usage_error() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "grn-eval", version, about = "Evaluate and benchmark gene-network inference on perturbation data")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Accept negative expression values.
    #[arg(long, global = true)]
    allow_negative: bool,
    /// Write wall-clock timings to timing.json.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cell- and perturbation-level quality control.
    Qc(commands::QcArgs),
    /// Stratified train/test split.
    Split(commands::SplitArgs),
    /// Run a baseline method on a training split.
    Run(commands::RunArgs),
    /// Score a predicted network.
    Eval(commands::EvalArgs),
    /// Synthetic export and metric-validation sweep.
    Synth(commands::SynthArgs),
    /// Build a scoreboard from per-model scores.
    Rank(commands::RankArgs),
}

fn resolve(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(o) = &global.out {
        cfg.out = Some(o.clone());
    }
    if let Some(t) = global.threads {
        cfg.threads = Some(t);
    }
    cfg.allow_negative |= global.allow_negative;
    cfg.timing |= global.timing;
    Ok(cfg)
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = resolve(&cli.global)?;
    init_threads(cfg.threads)?;
    match cli.command {
        Command::Qc(a) => commands::qc(&mut cfg, a),
        Command::Split(a) => commands::split(&mut cfg, a),
        Command::Run(a) => commands::run(&mut cfg, a),
        Command::Eval(a) => commands::eval(&mut cfg, a),
        Command::Synth(a) => commands::synth(&mut cfg, a),
        Command::Rank(a) => commands::rank(&mut cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
