//! Good-set and stability diagnostics.
//!
//! These certify, for a concrete subset of samples, the conditions under
//! which stability-based robust estimation works: the subset's mean gradient
//! must sit close to the population gradient and its second moment must stay
//! spectrally bounded. The stability check is a sampled verifier — it probes
//! random large sub-subsets rather than enumerating all of them, which would
//! be exponential.

use rand::seq::SliceRandom;

use super::spectral::{sym_spectral_norm, top_eigenvector, PowerOptions};
use crate::linalg::{add_scaled, dist, SymMat};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{real, Error, Real, Result};

/// Pass thresholds for the good-set check: `mean_constant * sigma * sqrt(eps)`
/// on the mean deviation and `cov_constant * sigma^2` on the second moment.
#[derive(Debug, Clone, Copy)]
pub struct GoodSetConfig<F> {
    pub mean_constant: F,
    pub cov_constant: F,
    pub power: PowerOptions<F>,
}

impl<F: Real> Default for GoodSetConfig<F> {
    fn default() -> Self {
        GoodSetConfig {
            mean_constant: real(4.0),
            cov_constant: real(4.0),
            power: PowerOptions::new(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GoodSetReport<F> {
    /// `|| (1/|S|) sum_{i in S} (g_i - pop_grad) ||`.
    pub mean_deviation: F,
    /// Spectral norm of `(1/|S|) sum (g_i - pop_grad)(g_i - pop_grad)^T`.
    pub second_moment_norm: F,
    pub mean_bound: F,
    pub second_moment_bound: F,
    pub passes: bool,
}

/// Checks whether an index subset of gradient samples is "good" with respect
/// to the population gradient: mean deviation at most
/// `mean_constant * sigma * sqrt(eps)` and centered-at-truth second moment at
/// most `cov_constant * sigma^2` in spectral norm.
pub fn check_good_set<F: Real>(
    grads: &[Vec<F>],
    subset: &[usize],
    pop_grad: &[F],
    sigma: F,
    epsilon: F,
    config: &GoodSetConfig<F>,
) -> Result<GoodSetReport<F>> {
    let n = grads.len();
    validate_subset(subset, n, epsilon)?;
    let dim = pop_grad.len();
    if grads.iter().any(|g| g.len() != dim) {
        return Err(Error::InvalidArgument(
            "gradient dimensions must match".into(),
        ));
    }

    let m = F::from_usize(subset.len()).unwrap();
    let inv = F::one() / m;
    let mut mean_dev = vec![F::zero(); dim];
    let mut centered: Vec<Vec<F>> = Vec::with_capacity(subset.len());
    for &i in subset {
        let c: Vec<F> = grads[i]
            .iter()
            .zip(pop_grad.iter())
            .map(|(g, p)| *g - *p)
            .collect();
        add_scaled(&mut mean_dev, &c, inv);
        centered.push(c);
    }
    let mean_deviation = crate::linalg::norm(&mean_dev);

    let weights = vec![inv; centered.len()];
    let zero = vec![F::zero(); dim];
    let second = SymMat::weighted_covariance(&centered, &weights, &zero, F::one());
    let second_moment_norm = top_eigenvector(&second, &config.power)?
        .value
        .max(F::zero());

    let mean_bound = config.mean_constant * sigma * epsilon.max(F::zero()).sqrt();
    let second_moment_bound = config.cov_constant * sigma * sigma;
    Ok(GoodSetReport {
        mean_deviation,
        second_moment_norm,
        mean_bound,
        second_moment_bound,
        passes: mean_deviation <= mean_bound && second_moment_norm <= second_moment_bound,
    })
}

/// Controls for the sampled stability verifier.
#[derive(Debug, Clone, Copy)]
pub struct StabilityConfig<F> {
    /// Number of random large sub-subsets probed (the full subset is always
    /// included as well).
    pub probes: usize,
    pub seed: u64,
    pub power: PowerOptions<F>,
}

impl<F: Real> Default for StabilityConfig<F> {
    fn default() -> Self {
        StabilityConfig {
            probes: 200,
            seed: 0x57AB,
            power: PowerOptions::new(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StabilityReport<F> {
    pub worst_mean_deviation: F,
    pub worst_cov_deviation: F,
    /// `sigma * delta`.
    pub mean_bound: F,
    /// `sigma^2 * delta^2 / eps`.
    pub cov_bound: F,
    pub mean_ok: bool,
    pub cov_ok: bool,
    pub passes: bool,
    pub subsets_checked: usize,
}

/// Sampled check of (eps, delta)-stability of `subset` with respect to mean
/// `mu` and scale `sigma`: over the full subset and random sub-subsets of
/// the minimal allowed size `ceil((1-eps)|S|)`, verifies that the sub-subset
/// mean stays within `sigma * delta` of `mu` and that the second moment
/// centered at `mu` stays within `sigma^2 delta^2 / eps` of `sigma^2 I`.
pub fn check_stability<F: Real>(
    points: &[Vec<F>],
    subset: &[usize],
    mu: &[F],
    sigma: F,
    epsilon: F,
    delta: F,
    config: &StabilityConfig<F>,
) -> Result<StabilityReport<F>> {
    let n = points.len();
    let half = F::one() / real(2.0);
    if !(epsilon > F::zero() && epsilon < half) {
        return Err(Error::InvalidArgument(
            "epsilon must lie in (0, 1/2)".into(),
        ));
    }
    if delta < epsilon {
        return Err(Error::InvalidArgument(
            "delta must be at least epsilon".into(),
        ));
    }
    validate_subset(subset, n, epsilon)?;
    let dim = mu.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidArgument("point dimensions must match".into()));
    }

    let keep =
        ((F::one() - epsilon).to_f64().unwrap() * subset.len() as f64 - 1e-9).ceil() as usize;
    let keep = keep.clamp(1, subset.len());

    let mut rng = rng_from_seed(derive_seed(config.seed, 0x5AB1));
    let mut worst_mean = F::zero();
    let mut worst_cov = F::zero();
    let mut scratch: Vec<usize> = subset.to_vec();
    let mut checked = 0usize;

    let eval = |indices: &[usize], worst_mean: &mut F, worst_cov: &mut F| -> Result<()> {
        let m = F::from_usize(indices.len()).unwrap();
        let inv = F::one() / m;
        let mut mean = vec![F::zero(); dim];
        for &i in indices {
            add_scaled(&mut mean, &points[i], inv);
        }
        let dev = dist(&mean, mu);
        *worst_mean = worst_mean.max(dev);

        let sel: Vec<Vec<F>> = indices.iter().map(|&i| points[i].clone()).collect();
        let weights = vec![inv; sel.len()];
        let mut second = SymMat::weighted_covariance(&sel, &weights, mu, F::one());
        second.add_diagonal(-sigma * sigma);
        let cov_dev = sym_spectral_norm(&second, &config.power)?;
        *worst_cov = worst_cov.max(cov_dev);
        Ok(())
    };

    eval(subset, &mut worst_mean, &mut worst_cov)?;
    checked += 1;
    for _ in 0..config.probes {
        scratch.shuffle(&mut rng);
        let mut probe: Vec<usize> = scratch[..keep].to_vec();
        probe.sort_unstable();
        eval(&probe, &mut worst_mean, &mut worst_cov)?;
        checked += 1;
    }

    let mean_bound = sigma * delta;
    let cov_bound = sigma * sigma * delta * delta / epsilon;
    let mean_ok = worst_mean <= mean_bound;
    let cov_ok = worst_cov <= cov_bound;
    Ok(StabilityReport {
        worst_mean_deviation: worst_mean,
        worst_cov_deviation: worst_cov,
        mean_bound,
        cov_bound,
        mean_ok,
        cov_ok,
        passes: mean_ok && cov_ok,
        subsets_checked: checked,
    })
}

fn validate_subset<F: Real>(subset: &[usize], n: usize, epsilon: F) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("subset must be nonempty".into()));
    }
    if subset.iter().any(|&i| i >= n) {
        return Err(Error::InvalidArgument("subset index out of range".into()));
    }
    let mut seen = subset.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != subset.len() {
        return Err(Error::InvalidArgument(
            "subset indices must be distinct".into(),
        ));
    }
    let required = (F::one() - epsilon).to_f64().unwrap() * n as f64 - 1e-9;
    if (subset.len() as f64) < required {
        return Err(Error::InvalidArgument(format!(
            "subset of size {} is below the (1 - eps) fraction of {n}",
            subset.len()
        )));
    }
    Ok(())
}
