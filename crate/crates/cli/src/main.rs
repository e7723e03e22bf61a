use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hetcov_cli::{cmd_compare, cmd_run, cmd_sweep, Report};

/// Coverage control with aerial and ground robot teams.
#[derive(Parser)]
#[command(name = "hetcov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario with the configured controller.
    Run {
        /// Scenario TOML file, or `builtin:default`.
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run all three controllers from the same start and tabulate final costs.
    Compare {
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep the aerial/ground ratio, e.g. `--ratios 1/12,2/12,4/12`.
    Sweep {
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        ratios: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out, seed } => cmd_run(config, out, *seed),
        Command::Compare { config, out, seed } => cmd_compare(config, out, *seed),
        Command::Sweep {
            config,
            out,
            ratios,
            seed,
        } => cmd_sweep(config, ratios, out, *seed),
    };
    match result {
        Ok(report) => finish(&report),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn finish(report: &Report) -> ExitCode {
    for line in &report.lines {
        println!("{line}");
    }
    if !report.converged {
        eprintln!("warning: iteration budget reached before convergence");
    }
    ExitCode::from(report.exit_code())
}
