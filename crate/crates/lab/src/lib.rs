//! Config-driven experiment runner for `timesq-core`.
//!
//! Each subcommand reads one TOML table, computes its report in memory and
//! writes CSV tables (with the config echoed in `#` header comments) plus a
//! JSON summary. Exit codes follow [`error::exit`].

pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod run;
pub mod seed;

use std::path::Path;

pub use config::{ExperimentConfig, Subcommand};
pub use error::{LabError, Result};
pub use report::Report;

/// Parses `text`, runs the subcommand and writes its reports into `out`.
/// Returns the process exit code.
pub fn run_to_dir(subcommand: Subcommand, text: &str, seed: Option<u64>, out: &Path) -> Result<u8> {
    let config = ExperimentConfig::parse(subcommand, text, seed)?;
    let outcome = run::run(&config);
    report::write_outputs(out, &config, &outcome)?;
    Ok(match &outcome {
        Ok(report) => report.exit_code(),
        Err(e) => e.exit_code(),
    })
}
