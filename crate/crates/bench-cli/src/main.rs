use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use robust_sco_bench::{fit_scaling, read_csv_file, run_experiment, write_csv_file};
use robust_sco_bench::{BenchError, ExperimentConfig, ScalingAxis};

/// Seeded benchmark harness for robust stochastic convex optimization.
#[derive(Parser)]
#[command(name = "robust-sco-bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid described by a TOML config and write a CSV.
    Run {
        /// Path to the experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a scaling exponent from a results CSV.
    Fit {
        /// Input CSV produced by `run`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Grid axis to regress against: `epsilon` or `n`.
        #[arg(long)]
        axis: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // One machine-readable line on stderr.
            let line = serde_json::json!({
                "error": err.code(),
                "message": err.to_string(),
            });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> robust_sco_bench::Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(BenchError::Io)?;
            let cfg = ExperimentConfig::from_toml(&text)?;
            let records = run_experiment(&cfg)?;
            write_csv_file(&records, &out)?;
            eprintln!("wrote {} records to {}", records.len(), out.display());
            Ok(())
        }
        Command::Fit { input, axis } => {
            let records = read_csv_file(&input)?;
            let fit = fit_scaling(&records, ScalingAxis::parse(&axis)?)?;
            let out = serde_json::json!({
                "axis": axis,
                "exponent": fit.exponent,
                "prefactor": fit.prefactor,
                "r_squared": fit.r_squared,
                "cells": fit.points.len(),
            });
            println!("{out}");
            Ok(())
        }
    }
}
