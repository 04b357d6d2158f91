//! Configuration, orchestration and output for the `chns` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

pub use config::RunConfig;
pub use error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Run,
    Pair,
    Galerkin,
    Longtime,
    VerifyAssumptions,
    LiftCheck,
    Validate,
}

/// Loads the config, applies overrides and dispatches.
pub fn execute(
    cmd: Command,
    config: &std::path::Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?.with_seed(seed);
    let ctx = commands::Context::new(&cfg, out);
    match cmd {
        Command::Run => commands::run(&cfg, &ctx),
        Command::Pair => commands::pair(&cfg, &ctx),
        Command::Galerkin => commands::galerkin(&cfg, &ctx),
        Command::Longtime => commands::longtime(&cfg, &ctx),
        Command::VerifyAssumptions => commands::verify_assumptions(&cfg, &ctx),
        Command::LiftCheck => commands::lift_check(&cfg, &ctx),
        Command::Validate => commands::validate(&cfg, &ctx),
    }
}
