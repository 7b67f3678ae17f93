//! Strong contamination adversaries.
//!
//! An adversary inspects the clean sample list and replaces up to
//! `floor(epsilon * n)` entries before the estimators see them. Four
//! canonical attacks are provided, each stressing a different failure mode
//! of naive estimation: a constant mean shift, the sign-flip swap that
//! realizes the indistinguishable spike pair, a shift along the top
//! covariance direction, and a Huber-style mixture with a second family.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::FeasibleDomain;
use crate::estimators::{top_eigenvector, PowerOptions};
use crate::linalg::{add_scaled, normalize, scale_in_place, SymMat};
use crate::problems::{FunctionDistribution, SampleFunction};
use crate::rng::{derive_seed, rng_from_seed, STREAM_ADVERSARY, STREAM_POWER};
use crate::{Error, Real, Result};

/// Which attack to run, with its parameters.
///
/// `magnitude` is the shift length used by `MeanShift` and `WorstDirection`.
#[derive(Debug, Clone)]
pub enum AdversarySpec<F> {
    /// No replacements regardless of the budget.
    None,
    /// Replaces chosen samples with constant-gradient functions whose
    /// gradient is the clean sample-mean gradient at the probe point plus
    /// `magnitude` times a fixed unit direction (first basis vector unless
    /// overridden).
    MeanShift {
        magnitude: F,
        direction: Option<Vec<F>>,
    },
    /// Flips the sign of negative spike samples (up to the budget), turning
    /// the centered spike law into its biased twin.
    TvSwap,
    /// Like `MeanShift`, but the direction is the top eigenvector of the
    /// clean gradient covariance at the probe point.
    WorstDirection { magnitude: F },
    /// Replaces a Bernoulli(epsilon)-selected subset (still capped at the
    /// budget) with fresh draws from a target distribution.
    HuberMixture { target: FunctionDistribution<F> },
}

impl<F> AdversarySpec<F> {
    pub fn tag(&self) -> &'static str {
        match self {
            AdversarySpec::None => "none",
            AdversarySpec::MeanShift { .. } => "mean_shift",
            AdversarySpec::TvSwap => "tv_swap",
            AdversarySpec::WorstDirection { .. } => "worst_direction",
            AdversarySpec::HuberMixture { .. } => "huber_mixture",
        }
    }
}

/// The sample list handed to estimators, plus diagnostics that they never
/// see: which indices were replaced, and by whom.
#[derive(Debug, Clone)]
pub struct ContaminatedSampleSet<F> {
    functions: Vec<SampleFunction<F>>,
    corruption_mask: Vec<bool>,
    epsilon: F,
    adversary: &'static str,
    seed: u64,
}

impl<F: Real> ContaminatedSampleSet<F> {
    /// What the estimators receive: the functions with the mask stripped.
    pub fn functions(&self) -> &[SampleFunction<F>] {
        &self.functions
    }

    pub fn into_functions(self) -> Vec<SampleFunction<F>> {
        self.functions
    }

    /// Diagnostics only.
    pub fn corruption_mask(&self) -> &[bool] {
        &self.corruption_mask
    }

    pub fn num_corrupted(&self) -> usize {
        self.corruption_mask.iter().filter(|b| **b).count()
    }

    pub fn epsilon(&self) -> F {
        self.epsilon
    }

    pub fn adversary(&self) -> &'static str {
        self.adversary
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Replacement budget `floor(epsilon * n)`, with a tiny nudge so that exact
/// products that land on an integer are not pushed below it by rounding.
pub fn replacement_budget<F: Real>(epsilon: F, n: usize) -> usize {
    let raw = epsilon.to_f64().unwrap_or(0.0) * n as f64;
    ((raw + 1e-9).floor() as usize).min(n)
}

/// Runs the adversary on a clean sample list.
///
/// The probe point for gradient-reading attacks is the domain center. The
/// adversary sees the clean samples and its own seed, never the solver's.
pub fn corrupt<F: Real>(
    clean: &[SampleFunction<F>],
    adversary: &AdversarySpec<F>,
    epsilon: F,
    domain: &FeasibleDomain<F>,
    seed: u64,
) -> Result<ContaminatedSampleSet<F>> {
    if !(epsilon >= F::zero()) {
        return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
    }
    let half = F::one() / (F::one() + F::one());
    if epsilon >= half {
        return Err(Error::InvalidArgument(
            "epsilon at or above one half exceeds the breakdown point".into(),
        ));
    }
    if clean.is_empty() {
        return Err(Error::InvalidArgument(
            "clean sample list must be nonempty".into(),
        ));
    }
    let n = clean.len();
    let budget = replacement_budget(epsilon, n);
    let mut functions: Vec<SampleFunction<F>> = clean.to_vec();
    let mut mask = vec![false; n];

    match adversary {
        AdversarySpec::None => {}
        AdversarySpec::MeanShift {
            magnitude,
            direction,
        } => {
            if budget > 0 {
                let dim = clean[0].dim();
                let dir = unit_direction(direction.clone(), dim)?;
                let replacement = shifted_constant_gradient(clean, domain, &dir, *magnitude);
                for i in choose_indices(n, budget, seed) {
                    functions[i] = replacement.clone();
                    mask[i] = true;
                }
            }
        }
        AdversarySpec::WorstDirection { magnitude } => {
            if budget > 0 {
                let dir = top_covariance_direction(clean, domain, seed)?;
                let replacement = shifted_constant_gradient(clean, domain, &dir, *magnitude);
                for i in choose_indices(n, budget, seed) {
                    functions[i] = replacement.clone();
                    mask[i] = true;
                }
            }
        }
        AdversarySpec::TvSwap => {
            let mut flipped = 0usize;
            for (i, f) in functions.iter_mut().enumerate() {
                if flipped >= budget {
                    break;
                }
                if let SampleFunction::Spike { value, dim } = f {
                    if *value < F::zero() {
                        *f = SampleFunction::Spike {
                            value: -*value,
                            dim: *dim,
                        };
                        mask[i] = true;
                        flipped += 1;
                    }
                }
            }
        }
        AdversarySpec::HuberMixture { target } => {
            if budget > 0 {
                let mut select_rng = rng_from_seed(derive_seed(seed, STREAM_ADVERSARY));
                let draws =
                    target.sample_functions(budget, derive_seed(seed, STREAM_ADVERSARY ^ 0xff))?;
                let eps = epsilon.to_f64().unwrap_or(0.0);
                let mut used = 0usize;
                for i in 0..n {
                    if used >= budget {
                        break;
                    }
                    if select_rng.random::<f64>() < eps {
                        functions[i] = draws[used].clone();
                        mask[i] = true;
                        used += 1;
                    }
                }
            }
        }
    }

    Ok(ContaminatedSampleSet {
        functions,
        corruption_mask: mask,
        epsilon,
        adversary: adversary.tag(),
        seed,
    })
}

fn unit_direction<F: Real>(direction: Option<Vec<F>>, dim: usize) -> Result<Vec<F>> {
    match direction {
        Some(mut v) => {
            if v.len() != dim {
                return Err(Error::InvalidArgument(
                    "direction dimension mismatch".into(),
                ));
            }
            if normalize(&mut v) == F::zero() {
                return Err(Error::InvalidArgument("direction must be nonzero".into()));
            }
            Ok(v)
        }
        None => {
            let mut v = vec![F::zero(); dim];
            v[0] = F::one();
            Ok(v)
        }
    }
}

/// Constant-gradient function whose gradient is the clean mean gradient at
/// the probe point shifted by `magnitude` along `dir`.
fn shifted_constant_gradient<F: Real>(
    clean: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
    dir: &[F],
    magnitude: F,
) -> SampleFunction<F> {
    let probe = domain.center();
    let dim = probe.len();
    let mut mean = vec![F::zero(); dim];
    let inv_n = F::one() / F::from_usize(clean.len()).unwrap();
    for f in clean {
        add_scaled(&mut mean, &f.gradient(probe), inv_n);
    }
    add_scaled(&mut mean, dir, magnitude);
    // Linear sample with x = -g has constant gradient g.
    scale_in_place(&mut mean, -F::one());
    SampleFunction::Linear { x: mean }
}

fn top_covariance_direction<F: Real>(
    clean: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
    seed: u64,
) -> Result<Vec<F>> {
    let probe = domain.center();
    let grads: Vec<Vec<F>> = clean.iter().map(|f| f.gradient(probe)).collect();
    let n = grads.len();
    let w = vec![F::one() / F::from_usize(n).unwrap(); n];
    let mut mean = vec![F::zero(); probe.len()];
    for g in &grads {
        add_scaled(&mut mean, g, w[0]);
    }
    let cov = SymMat::weighted_covariance(&grads, &w, &mean, F::one());
    let eig = top_eigenvector(&cov, &PowerOptions::seeded(derive_seed(seed, STREAM_POWER)))?;
    Ok(eig.vector)
}

fn choose_indices(n: usize, budget: usize, seed: u64) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = rng_from_seed(derive_seed(seed, STREAM_ADVERSARY));
    indices.shuffle(&mut rng);
    let mut chosen: Vec<usize> = indices.into_iter().take(budget).collect();
    chosen.sort_unstable();
    chosen
}
