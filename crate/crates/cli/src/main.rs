use std::path::PathBuf;
use std::process::ExitCode;

use chns_cli::{execute, Command};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chns", version, about = "Cahn-Hilliard-Navier-Stokes channel simulator")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.directory`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for noise initial data (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Single run with records, snapshots and energy checks
    Run(Common),
    /// Base run plus two perturbed runs; continuous-dependence ratio
    Pair(Common),
    /// Truncated runs against the untruncated one
    Galerkin(Common),
    /// Long run with decaying wall data; residual and functional decay
    Longtime(Common),
    /// Growth bounds of the potential and viscosity
    VerifyAssumptions(Common),
    /// Couette lift exactness and parabolic/elliptic lift difference
    LiftCheck(Common),
    /// Re-checks additivity of an existing records.csv
    Validate(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, c) = match cli.command {
        Sub::Run(c) => (Command::Run, c),
        Sub::Pair(c) => (Command::Pair, c),
        Sub::Galerkin(c) => (Command::Galerkin, c),
        Sub::Longtime(c) => (Command::Longtime, c),
        Sub::VerifyAssumptions(c) => (Command::VerifyAssumptions, c),
        Sub::LiftCheck(c) => (Command::LiftCheck, c),
        Sub::Validate(c) => (Command::Validate, c),
    };
    match execute(cmd, &c.config, c.out, c.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
