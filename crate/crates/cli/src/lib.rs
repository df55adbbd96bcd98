//! `ensel`: generate synthetic predictor pools, run ensemble-selection
//! experiments and inspect their reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod matrix_csv;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ensel",
    version,
    about = "Diversity-directed RL ensemble selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic prediction-matrix CSV.
    Generate {
        /// Synthetic pool spec (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an experiment and write report.json and curve CSVs.
    Select {
        /// Run configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the master seed of the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum number of worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory; overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a slice of a report: summary, parsimony, curve:<algorithm>,
    /// path or baselines.
    Inspect { report: PathBuf, query: String },
}

/// Runs a parsed command line, returning what should go to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Generate { config, out, seed } => commands::cmd_generate(&config, &out, seed),
        Command::Select {
            config,
            seed,
            jobs,
            out,
        } => {
            let outcome = commands::cmd_select(&config, seed, jobs, out.as_deref())?;
            for cell in outcome.report.cells.iter().filter(|c| c.non_converged > 0) {
                eprintln!(
                    "warning: {} (epsilon {}): {}/{} runs hit max_episodes without converging",
                    cell.algorithm, cell.epsilon, cell.non_converged, cell.runs
                );
            }
            let mut text = commands::summary(&outcome.report);
            text.push_str(&format!("report: {}\n", outcome.report_path.display()));
            for p in &outcome.curve_paths {
                text.push_str(&format!("curve: {}\n", p.display()));
            }
            Ok(text)
        }
        Command::Inspect { report, query } => {
            let report = commands::load_report(&report)?;
            commands::cmd_inspect(&report, &query)
        }
    }
}
