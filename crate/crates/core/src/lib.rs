//! Robust stochastic convex optimization under the strong contamination model.
//!
//! The setting: `n` loss functions are drawn i.i.d. from a distribution with
//! convex population risk, and an adversary may inspect them and replace up to
//! an ε-fraction before the solver sees them. This crate provides the pieces
//! needed to minimize the population risk anyway, and to measure how well that
//! works:
//!
//! - [`problems`] — closed-form loss families with known population risk,
//!   gradient, and regularity constants, including the hard instances that
//!   realize the information-theoretic error floor;
//! - [`contamination`] — canonical contamination adversaries operating under
//!   an explicit replacement budget;
//! - [`estimators`] — robust mean estimation by iterative filtering, bucketed
//!   preprocessing, covariance-scale lower bounds, and good-set / stability
//!   diagnostics;
//! - [`optimizer`] — projected gradient descent with biased gradient oracles,
//!   a grid-net variant that reuses robust estimates across iterates, and a
//!   convolutional-smoothing wrapper for nonsmooth population risks.
//!
//! The numeric core is generic over the scalar type via [`Real`] (`f32` or
//! `f64`); concrete `f64` aliases live at the crate root. All randomness flows
//! from explicit 64-bit seeds through the ChaCha8 counter-based generator
//! ([`rng`]), so identical inputs give bitwise-identical outputs.

// Validation guards are written as `!(x > 0)` on purpose: the negated form
// also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contamination;
pub mod domain;
pub mod estimators;
pub mod linalg;
pub mod optimizer;
pub mod problems;
pub mod rng;

mod scalar;

pub use scalar::{real, Real};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The requested contamination level is beyond what the filtering
    /// estimator can tolerate.
    #[error("breakdown point exceeded: {0}")]
    BreakdownExceeded(String),
    /// The operation needs a closed form the family does not have.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;

// Concrete aliases for the common scalar type.
pub type FeasibleDomain64 = domain::FeasibleDomain<f64>;
pub type FunctionDistribution64 = problems::FunctionDistribution<f64>;
pub type SampleFunction64 = problems::SampleFunction<f64>;
pub type RiskConstants64 = problems::RiskConstants<f64>;
pub type AdversarySpec64 = contamination::AdversarySpec<f64>;
pub type ContaminatedSampleSet64 = contamination::ContaminatedSampleSet<f64>;
pub type FilterConfig64 = estimators::FilterConfig<f64>;
pub type FilterReport64 = estimators::FilterReport<f64>;
pub type PgdConfig64 = optimizer::PgdConfig<f64>;
pub type PgdRun64 = optimizer::PgdRun<f64>;
pub type RobustSolverConfig64 = optimizer::RobustSolverConfig<f64>;
pub type RobustRun64 = optimizer::RobustRun<f64>;
pub type NetConfig64 = optimizer::NetConfig<f64>;
