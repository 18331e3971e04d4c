use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conewave::{exit, run, CliError, Command, ExperimentConfig, Scenario};

#[derive(Parser)]
#[command(name = "conewave", version, about = "Frequency-band wave packets, first-term approximations and certified bounds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exponent δ in (0.5, 0.75); overrides `delta`.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Reserved; every path is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Sample u_f on the configured (t, x) grid.
    Evaluate,
    /// Compare u_f with H_f and the remainder bound at every grid point.
    Approximate,
    /// Optimal cone origin by closed form and three-point fit.
    Origin,
    /// Run the certification suite for the configured scenario.
    Verify,
    /// Decay of the maximal first-term error over log-spaced times.
    Sweep,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Evaluate => Command::Evaluate,
            Cmd::Approximate => Command::Approximate,
            Cmd::Origin => Command::Origin,
            Cmd::Verify => Command::Verify,
            Cmd::Sweep => Command::Sweep,
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    conewave::parallel::init_thread_pool().map_err(CliError::Config)?;
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut config = ExperimentConfig::from_path(path)?;
    if let Some(d) = cli.delta {
        config.delta = d;
    }
    if let Some(dir) = &cli.out {
        config.output.directory = dir.clone();
    }
    let out = config.output.directory.clone();
    let scenario = Scenario::build(config)?;
    run(cli.command.into(), &scenario, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("conewave: {e}");
            exit::RUNTIME
        }
    };
    ExitCode::from(code as u8)
}
