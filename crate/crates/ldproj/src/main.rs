use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ldproj::{commands, CliError, Format, Invocation, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "ldproj", version, about = "Cramér and universal rate functions for projections of i.i.d. vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's output path).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Replaces the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Tabulate the Cramér and/or universal rate function on a grid.
    Rate,
    /// Check hypotheses, then compare the two rate functions.
    Compare,
    /// Tilted Monte Carlo estimates of the tail probability.
    Simulate,
    /// Finite-n log-mgf convergence profile and the basis-direction curve.
    Lmgf,
    /// Hypothesis and Jensen checks only.
    Check,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.config.ok_or_else(|| CliError::config("--config is required"))?;
    let config = RunConfig::load(&path)?;
    let inv = Invocation::new(config, cli.out, cli.format, cli.seed, cli.threads);
    match cli.command {
        Command::Rate => commands::rate(&inv),
        Command::Compare => commands::compare(&inv),
        Command::Simulate => commands::simulate(&inv),
        Command::Lmgf => commands::lmgf(&inv),
        Command::Check => commands::check(&inv),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", CliError::config(e.to_string().trim_end()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
