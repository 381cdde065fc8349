//! `entrosig` command-line front end: WAV ingestion, configuration, the
//! analyze/detect/sweep/verify/synth subcommands and their CSV/JSON output.
//!
//! Exit codes: 0 on success, 1 when verification or the detection policy
//! fails, 2 for usage and parse errors.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;
pub mod wav;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunArgs, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] entrosig_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Core(entrosig_core::Error::InvalidParameter(_)) => 2,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "entrosig",
    version,
    about = "Information criteria for detecting signals in white noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-frame criterion values as CSV (or JSON).
    Analyze(RunArgs),
    /// Thresholded events of one criterion as JSON (or CSV).
    Detect(RunArgs),
    /// Margins and detection flags over noise levels as CSV (or JSON).
    Sweep(RunArgs),
    /// Numerical checks of the analytical identities.
    Verify(VerifyArgs),
    /// Render a synthetic mixture to a 16-bit WAV.
    Synth(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = ["text", "json"])]
    pub format: Option<String>,
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

/// Runs one parsed command and returns its output and where it goes.
pub fn execute(
    cli: &Cli,
    env_seed: Option<String>,
) -> Result<(commands::Output, Option<std::path::PathBuf>), CliError> {
    let resolve = |args: &RunArgs| RunConfig::resolve(args, env_seed.clone());
    Ok(match &cli.command {
        Command::Analyze(a) => {
            let cfg = resolve(a)?;
            (commands::cmd_analyze(&cfg)?, cfg.output)
        }
        Command::Detect(a) => {
            let cfg = resolve(a)?;
            (commands::cmd_detect(&cfg)?, cfg.output)
        }
        Command::Sweep(a) => {
            let cfg = resolve(a)?;
            (commands::cmd_sweep(&cfg)?, cfg.output)
        }
        Command::Synth(a) => (commands::cmd_synth(&resolve(a)?)?, None),
        Command::Verify(v) => {
            let seed = match (v.seed, &env_seed) {
                (Some(s), _) => s,
                (None, Some(e)) => e.trim().parse().map_err(|_| {
                    CliError::Usage(format!(
                        "{}='{e}' is not an unsigned integer",
                        config::SEED_ENV
                    ))
                })?,
                (None, None) => 0,
            };
            let format = v.format.as_deref().map(str::parse::<Format>).transpose()?;
            (
                commands::cmd_verify(seed, format, &verify::Kernels::default())?,
                v.output.clone(),
            )
        }
    })
}

/// Full command-line entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let env_seed = std::env::var(config::SEED_ENV).ok();
    match execute(&cli, env_seed) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => {
                    std::fs::write(&p, &out.bytes).map_err(|e| format!("{}: {e}", p.display()))
                }
                None => std::io::stdout()
                    .write_all(&out.bytes)
                    .map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return 1;
            }
            if out.success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
