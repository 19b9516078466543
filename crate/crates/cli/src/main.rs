//! `lwnls`: ground states, sweeps and property suites from the command line.
//!
//! Exit codes: 0 success, 1 configuration or validation error, 2 numerical
//! non-convergence.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Outcome, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lwnls::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser)]
#[command(
    name = "lwnls",
    version,
    about = "Fractional Schrödinger ground states on a periodic spectral grid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML problem and solver configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `solver.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Re-run at 2N and at (2L, 2N) and report the drift of c.
    #[arg(long)]
    refine: bool,
}

impl RunArgs {
    fn options(&self) -> RunOptions<'_> {
        RunOptions {
            config_path: &self.config,
            out: &self.out,
            seed: self.seed,
            jobs: self.jobs,
            refine: self.refine,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the ground state and its diagnostics.
    GroundState(RunArgs),
    /// Ground states over the `[sweep]` parameter values.
    Sweep(RunArgs),
    /// Run a property suite: spectral, spaces, nehari, rearrange or theorems.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Symmetric decreasing rearrangement of an `x,u` profile CSV.
    Rearrange {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn outcome_code(o: Outcome) -> ExitCode {
    match o {
        Outcome::Converged => ExitCode::SUCCESS,
        Outcome::NotConverged => {
            eprintln!("lwnls: solver did not converge");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GroundState(a) => commands::cmd_ground_state(&a.options()).map(outcome_code),
        Command::Sweep(a) => commands::cmd_sweep(&a.options()).map(outcome_code),
        Command::Verify { suite, seed } => {
            commands::cmd_verify(suite, *seed).map(|ok| if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Rearrange { input, out } => commands::cmd_rearrange(input, out).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("lwnls: {e}");
        ExitCode::from(1)
    })
}
