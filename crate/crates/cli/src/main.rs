//! `rdsym`: simulate the coupled reaction-diffusion systems, evaluate
//! their Jacobi-elliptic closed forms, integrate the symmetry-reduced
//! ODE systems, and run the seeded verification suites.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime/domain
//! error (blow-up, pole crossing), 3 verification failure.

mod commands;
mod config;
mod plot;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing configuration; exit 1.
    Config(String),
    /// Domain or runtime failure during an otherwise valid run; exit 2.
    Runtime(String),
    /// One or more verification invariants failed; exit 3.
    Verification,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
            CliError::Verification => write!(f, "verification failure"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Verification => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "rdsym",
    about = "Reaction-diffusion simulation, closed-form evaluation, and verification"
)]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV and plot files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Also write static SVG plots (simulate / exact).
    #[arg(long, global = true)]
    plot: bool,

    /// Seed for randomized invariant sampling.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a PDE simulation and export t,x,U,V snapshots.
    Simulate,
    /// Evaluate a closed-form solution on a grid (same CSV schema).
    Exact,
    /// Run a verification suite and report measured vs tolerated.
    Verify {
        /// elliptic | exact | symmetry | reduction | convergence | all
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Integrate a reduced ODE system and dump the trajectory.
    Reduce,
    /// Manufactured-solution grid-refinement study.
    Convergence,
}

fn load_config(path: &Option<PathBuf>) -> Result<Config, CliError> {
    match path {
        Some(p) => Config::from_path(p),
        None => Err(CliError::Config(
            "this command needs --config <path>".into(),
        )),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    std::fs::create_dir_all(&cli.out).map_err(|e| {
        CliError::Config(format!(
            "cannot create output directory {}: {e}",
            cli.out.display()
        ))
    })?;
    match &cli.command {
        Command::Simulate => commands::cmd_simulate(&load_config(&cli.config)?, &cli.out, cli.plot),
        Command::Exact => commands::cmd_exact(&load_config(&cli.config)?, &cli.out, cli.plot),
        Command::Verify { suite } => commands::cmd_verify(suite, cli.seed, &cli.out),
        Command::Reduce => commands::cmd_reduce(&load_config(&cli.config)?, &cli.out),
        Command::Convergence => commands::cmd_convergence(&load_config(&cli.config)?, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
