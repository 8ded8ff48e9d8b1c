use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use timesq_lab::{error::exit, run_to_dir, Subcommand};

/// Reproducible experiments on times-q orbits, entropy, p-adics and density.
#[derive(Parser, Debug)]
#[command(name = "lab", version)]
struct Cli {
    subcommand: Subcommand,
    /// TOML config with a table named after the subcommand.
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV and JSON reports.
    #[arg(long, default_value = "lab-out")]
    out: PathBuf,
    /// Overrides the config's `seed` (default 0).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("lab: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(exit::CONFIG);
        }
    };
    match run_to_dir(cli.subcommand, &text, cli.seed, &cli.out) {
        Ok(code) => {
            let summary = cli.out.join(format!("{}_summary.json", cli.subcommand));
            if code == exit::SUCCESS {
                eprintln!("lab: {} ok, reports in {}", cli.subcommand, cli.out.display());
            } else {
                eprintln!("lab: {} exited with {code}, see {}", cli.subcommand, summary.display());
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
