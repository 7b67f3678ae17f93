//! Convolutional smoothing by uniform ball perturbations.
//!
//! Replacing each sample `f_i` by `w -> f_i(w + u_i)` with `u_i` uniform on
//! the radius-`s` ball turns an `L`-Lipschitz objective into an
//! `L sqrt(d) / s`-smooth one at the price of `L * s` bias and an inflated
//! gradient-covariance bound `sqrt(sigma^2 + 4 L^2)`.

use rand::Rng;

use crate::rng::{normal_vector, rng_from_seed, uniform_unit};
use crate::{real, Error, Real, Result};

/// Exact uniform draw from the radius-`radius` L2 ball: a normalized
/// Gaussian direction scaled by `radius * U^(1/d)`.
pub fn sample_uniform_ball_with<F: Real, R: Rng + ?Sized>(
    dim: usize,
    radius: F,
    rng: &mut R,
) -> Vec<F> {
    loop {
        let mut z: Vec<F> = normal_vector(rng, dim);
        let n = crate::linalg::norm(&z);
        if n == F::zero() {
            continue;
        }
        let u: F = uniform_unit(rng);
        let r = radius * u.powf(F::one() / real::<F>(dim as f64));
        let s = r / n;
        for x in z.iter_mut() {
            *x *= s;
        }
        return z;
    }
}

/// Seeded one-shot version of [`sample_uniform_ball_with`].
pub fn sample_uniform_ball<F: Real>(dim: usize, radius: F, seed: u64) -> Result<Vec<F>> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if radius < F::zero() {
        return Err(Error::InvalidArgument("radius must be nonnegative".into()));
    }
    let mut rng = rng_from_seed(seed);
    Ok(sample_uniform_ball_with(dim, radius, &mut rng))
}

/// Per-sample perturbations plus the effective constants of the smoothed
/// problem.
#[derive(Debug, Clone)]
pub struct SmoothingPlan<F> {
    pub radius: F,
    pub perturbations: Vec<Vec<F>>,
    /// `lipschitz * sqrt(d) / radius`.
    pub effective_smoothness: F,
    /// `sqrt(sigma^2 + 4 lipschitz^2)`.
    pub effective_sigma: F,
}

pub fn smoothing_plan<F: Real>(
    dim: usize,
    n: usize,
    radius: F,
    lipschitz: F,
    sigma: F,
    seed: u64,
) -> Result<SmoothingPlan<F>> {
    if !(radius > F::zero()) {
        return Err(Error::InvalidArgument(
            "smoothing radius must be positive".into(),
        ));
    }
    if dim == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "dimension and sample count must be positive".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let perturbations: Vec<Vec<F>> = (0..n)
        .map(|_| sample_uniform_ball_with(dim, radius, &mut rng))
        .collect();
    let effective_smoothness = lipschitz * real::<F>(dim as f64).sqrt() / radius;
    let effective_sigma = (sigma * sigma + real::<F>(4.0) * lipschitz * lipschitz).sqrt();
    Ok(SmoothingPlan {
        radius,
        perturbations,
        effective_smoothness,
        effective_sigma,
    })
}
