use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fluctoforce_cli::scenario::Command;
use fluctoforce_cli::{run, threads_from_env, CliError, RunOptions};

/// Casimir pressures between layered slabs at different temperatures.
#[derive(Parser)]
#[command(name = "fluctoforce", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pressure breakdown at the scenario's separation.
    Pressure(Args),
    /// Breakdown along the scenario's [sweep] axis.
    Sweep(Args),
    /// Zero-force separations of plate 2 and their stability.
    Equilibria(Args),
    /// All curves of one published figure; --out names a directory.
    ReproduceFig(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV file, or directory for reproduce-fig.
    #[arg(long)]
    out: PathBuf,
    /// Relative tolerance of each quadrature pass; overrides the scenario.
    #[arg(long)]
    rel_tol: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Pressure(a) => (Command::Pressure, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Equilibria(a) => (Command::Equilibria, a),
        Cmd::ReproduceFig(a) => (Command::ReproduceFig, a),
    };
    let opts = RunOptions {
        command,
        scenario: args.scenario,
        out: args.out,
        rel_tol: args.rel_tol,
    };
    match setup_threads().and_then(|_| run(&opts)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fluctoforce: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn setup_threads() -> Result<(), CliError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}
