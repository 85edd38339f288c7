//! Configuration-driven runner: `scenario run`, `pb4 estimate`, `chord find`,
//! `tetragon build` and `validate config`.
//!
//! Exit status is 0 when every run passes, 2 on a scientific failure (bound
//! violated or chord not found) and 1 on usage, parse or runtime errors.
//! Reports are pretty JSON with stable key order; wall-clock timings go to a
//! separate `timing.json` so reports stay byte-identical across runs.
//!
//! Only `TETRALAB_THREADS` and `TETRALAB_OUTPUT_DIR` are read from the
//! environment.

pub mod config;
mod emit;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::chord::ChordError;
use crate::pb4::Pb4Error;
use crate::scenarios::ScenarioError;
use crate::tetragon::TetragonError;

pub use config::{
    apply_overrides, load_config, parse_config, ChordRunConfig, CommandKind, HamiltonianSpec, Pb4RunConfig,
    RegionName, RunConfig, TetragonRunConfig,
};
pub use emit::{execute, validate, ChordSummary, Pb4Summary, RunOutcome, RunReport, ScenarioSummary, TetragonPayload};

pub const THREADS_ENV: &str = "TETRALAB_THREADS";
pub const OUTPUT_DIR_ENV: &str = "TETRALAB_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "tetralab-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config error{}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default(), key.as_ref().map(|k| format!(", key `{k}`")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },
    #[error("bad override: {0}")]
    Override(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("cannot build thread pool: {0}")]
    Threads(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Pb4(#[from] Pb4Error),
    #[error(transparent)]
    Chord(#[from] ChordError),
    #[error(transparent)]
    Tetragon(#[from] TetragonError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "tetralab", version, about = "Chords, tetragons and pb4+ estimates from JSON configs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Group,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Turn-key scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Gridded pb4+ estimation.
    Pb4 {
        #[command(subcommand)]
        action: Pb4Action,
    },
    /// Chord search for a built-in Hamiltonian.
    Chord {
        #[command(subcommand)]
        action: ChordAction,
    },
    /// Tetragon construction and smoothing.
    Tetragon {
        #[command(subcommand)]
        action: TetragonAction,
    },
    /// Parse and check a configuration without running it.
    Validate {
        #[command(subcommand)]
        action: ValidateAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioAction {
    Run(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum Pb4Action {
    Estimate(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum ChordAction {
    Find(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum TetragonAction {
    Build(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum ValidateAction {
    Config(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON configuration file.
    pub config: PathBuf,
    /// Override a leaf key, e.g. `--set scenario.r1=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Suppress the per-run summary lines.
    #[arg(short, long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    pub config: PathBuf,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Thread count: flag, then config, then `TETRALAB_THREADS`, then all cores.
pub fn resolve_threads(flag: Option<usize>, cfg: &RunConfig) -> Result<usize, CliError> {
    if let Some(n) = flag.or(cfg.threads) {
        return if n == 0 {
            Err(CliError::Validation("threads must be at least 1".into()))
        } else {
            Ok(n)
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV}={v} is not a positive integer"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Output directory: flag, then config, then `TETRALAB_OUTPUT_DIR`, then
/// `tetralab-out`; created and made absolute.
pub fn resolve_output_dir(flag: Option<&Path>, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    dir.canonicalize().map_err(|source| CliError::Io { path: dir, source })
}

fn run_command(kind: CommandKind, args: &RunArgs) -> Result<RunOutcome, CliError> {
    let cfg = load_config(&args.config, &args.set)?;
    if cfg.command != kind {
        return Err(CliError::Validation(format!(
            "config is for `{}`, not `{}`",
            cfg.command.name(),
            kind.name()
        )));
    }
    let threads = resolve_threads(args.threads, &cfg)?;
    let out = resolve_output_dir(args.out.as_deref(), &cfg)?;
    let outcome = execute(&cfg, &out, threads)?;
    if !args.quiet {
        for line in &outcome.lines {
            println!("{line}");
        }
        if cfg.verbosity > 0 {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(outcome)
}

/// Runs a parsed command line and maps the result to the exit-code contract.
pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Group::Scenario {
            action: ScenarioAction::Run(a),
        } => run_command(CommandKind::Scenario, a),
        Group::Pb4 {
            action: Pb4Action::Estimate(a),
        } => run_command(CommandKind::Pb4, a),
        Group::Chord {
            action: ChordAction::Find(a),
        } => run_command(CommandKind::Chord, a),
        Group::Tetragon {
            action: TetragonAction::Build(a),
        } => run_command(CommandKind::Tetragon, a),
        Group::Validate {
            action: ValidateAction::Config(a),
        } => load_config(&a.config, &a.set).and_then(|cfg| {
            validate(&cfg)?;
            println!("ok: {} configuration is valid", cfg.command.name());
            Ok(RunOutcome::default_pass())
        }),
    };
    match result {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Entry point of the `tetralab` binary. Usage errors exit with 1.
pub fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
