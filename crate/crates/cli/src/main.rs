//! `signorini`: solve thin obstacle problems, write radial profiles, classify
//! free boundaries and run the verification suite.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 solver non-convergence or
//! a failed verification criterion.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const VERSION: &str = concat!("signorini ", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "signorini", version, about = "Thin obstacle problem laboratory")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Problem config (solve) or classifier config (classify).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override the grid size of the problem config.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Coarser grids and doubled discretization tolerances (verify).
    #[arg(long, global = true)]
    pub quick: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the problem in `--config` by projected SOR.
    Solve,
    /// Radial profiles of a field dump about a thin-plane point.
    Profile(commands::ProfileArgs),
    /// Classify the free boundary of a field dump.
    Classify(commands::ClassifyArgs),
    /// Run the acceptance criteria.
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve => commands::solve(&cli.common),
        Command::Profile(a) => commands::profile(&cli.common, a),
        Command::Classify(a) => commands::classify(&cli.common, a),
        Command::Verify(a) => commands::verify(&cli.common, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
