//! Robust mean estimation and its diagnostics.
//!
//! The workhorse is [`filter_mean`]: multiplicative downweighting of samples
//! that score high along the top covariance eigenvector, until the retained
//! weight drops to the contamination floor. On top of it sit bucketed
//! preprocessing for heavy tails ([`bucketed_filter_mean`]), a lower-bound
//! estimate of the covariance scale for the unknown-sigma setting
//! ([`estimate_sigma_lower_bound`]), and the good-set / stability checks
//! that certify when robust estimation is possible at all.

mod diagnostics;
mod filter;
mod spectral;

pub use diagnostics::{
    check_good_set, check_stability, GoodSetConfig, GoodSetReport, StabilityConfig, StabilityReport,
};
pub use filter::{
    bucketed_filter_mean, estimate_sigma_lower_bound, filter_mean, FilterConfig, FilterIteration,
    FilterReport, SigmaLowerBound, WeightVector,
};
pub use spectral::{
    covariance_diagnostics, sym_spectral_norm, top_eigenvector, top_eigenvector_dense,
    CovarianceDiagnostics, EigenEstimate, PowerOptions,
};

use crate::{real, Real};

/// The deviation scale `sqrt(eps) + sqrt(d/n) + sqrt(ln(1/tau)/n)` that
/// controls both the filter's estimation error and the stability margins.
pub fn stability_delta<F: Real>(epsilon: F, dim: usize, n: usize, tau: F) -> F {
    let nf = real::<F>(n as f64);
    let df = real::<F>(dim as f64);
    epsilon.max(F::zero()).sqrt() + (df / nf).sqrt() + ((F::one() / tau).ln() / nf).sqrt()
}
