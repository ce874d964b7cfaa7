use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tvopt_cli::{execute, Command, Options};

#[derive(Parser)]
#[command(
    name = "tvopt",
    version,
    about = "Run time-varying optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run every configured run sequentially
    Run(Common),
    /// Write the theory report for the configuration
    Bounds(Common),
    /// Run every configured run in parallel
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Maximum number of runs executing at once
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured seed
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress messages
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, jobs) = match cli.command {
        Sub::Run(c) => (Command::Run, c, None),
        Sub::Bounds(c) => (Command::Bounds, c, None),
        Sub::Sweep { common, jobs } => (Command::Sweep, common, jobs),
    };
    let opts = Options {
        config: common.config,
        out: common.out,
        seed: common.seed,
        quiet: common.quiet,
        jobs,
    };
    match execute(command, &opts) {
        Ok(outcome) => {
            for label in &outcome.aborted {
                eprintln!("run {label} aborted; see summary.csv");
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
