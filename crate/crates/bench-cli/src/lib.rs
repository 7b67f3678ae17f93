//! Experiment harness for the robust optimization toolkit.
//!
//! A TOML config describes one experiment: a loss family, an adversary, an
//! algorithm, and a grid over `(d, n, epsilon, sigma)`. The runner executes
//! every `(cell, trial)` pair under a derived seed, records the closed-form
//! excess risk of each solution, and writes a CSV whose bytes depend only on
//! the config and the base seed. The fitter regresses log mean excess risk
//! against a log grid axis to recover scaling exponents.

// Validation guards are written as `!(x > 0)` on purpose: the negated form
// also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod fit;
pub mod runner;
pub mod trace;

pub use config::{
    AdversaryConfig, AlgorithmConfig, DistributionConfig, ExperimentConfig, GridCell, GridConfig,
};
pub use fit::{fit_scaling, ScalingAxis, ScalingFit};
pub use runner::{read_csv, read_csv_file, run_experiment, write_csv, write_csv_file, TrialRecord};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] robust_sco::Error),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
}

impl BenchError {
    /// Stable machine-readable error code for the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            BenchError::Core(robust_sco::Error::InvalidArgument(_)) => "invalid-argument",
            BenchError::Core(robust_sco::Error::BreakdownExceeded(_)) => "breakdown-exceeded",
            BenchError::Core(robust_sco::Error::UnsupportedFamily(_)) => "unsupported-family",
            BenchError::InvalidConfig(_) => "invalid-config",
            BenchError::Io(_) => "io",
            BenchError::MalformedCsv(_) => "malformed-csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
