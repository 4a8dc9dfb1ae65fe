//! Batch entry point: `verify`, `constants`, `sweep` and `oracle` subcommands,
//! each driven entirely by a JSON experiment config.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use run::RunError;

/// Thread-count override honored when built with the parallel feature.
const THREADS_ENV: &str = "BIPOINCARE_THREADS";

#[derive(Parser)]
#[command(name = "bipoincare", version, about = "Verify biparametric Poincaré-type inequalities on discretized rectangles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the selected inequality checks and write CSV/JSON reports.
    Verify { config: PathBuf },
    /// Compute A_p / A_1 / slice / dual weight constants per weight spec.
    Constants { config: PathBuf },
    /// Run a weight sweep and fit the log-log slope against the constant.
    Sweep { config: PathBuf },
    /// Write brute-force fixture files (constants | maximal | T | weaknorm).
    Oracle { subject: String, config: PathBuf },
}

fn main() -> ExitCode {
    bipoincare::exec::init_threads_from_env(THREADS_ENV);
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Verify { config } => run::cmd_verify(config),
        Cmd::Constants { config } => run::cmd_constants(config),
        Cmd::Sweep { config } => run::cmd_sweep(config),
        Cmd::Oracle { subject, config } => run::cmd_oracle(subject, config),
    };
    match outcome {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(RunError::Config(errs)) => {
            for e in errs {
                eprintln!("config error: {e}");
            }
            ExitCode::from(2)
        }
        Err(RunError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
