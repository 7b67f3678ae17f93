//! Power iteration and covariance spectrum diagnostics.

use crate::linalg::{dot, norm_sq, normalize, weighted_mean, SymMat};
use crate::rng::{normal_vector, rng_from_seed};
use crate::{real, Error, Real, Result};

/// Default seed for power-iteration starting vectors. Held fixed and
/// data-independent so that permuting the input points cannot change the
/// start direction.
pub const DEFAULT_POWER_SEED: u64 = 0x9E37_79B9_7F4A_7C15;

/// Power-iteration controls.
#[derive(Debug, Clone, Copy)]
pub struct PowerOptions<F> {
    /// Convergence tolerance on the Rayleigh-quotient change, relative to the
    /// trace.
    pub tol: F,
    pub max_iter: usize,
    pub seed: u64,
}

impl<F: Real> PowerOptions<F> {
    pub fn new() -> Self {
        PowerOptions {
            tol: real(1e-8),
            max_iter: 200,
            seed: DEFAULT_POWER_SEED,
        }
    }

    pub fn seeded(seed: u64) -> Self {
        PowerOptions {
            seed,
            ..Self::new()
        }
    }
}

impl<F: Real> Default for PowerOptions<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// Outcome of a power-iteration run. `converged` is false when the iteration
/// budget ran out; the best iterate is still returned.
#[derive(Debug, Clone)]
pub struct EigenEstimate<F> {
    pub vector: Vec<F>,
    pub value: F,
    pub converged: bool,
    pub iterations: usize,
}

/// Approximates the top eigenpair of a symmetric matrix by power iteration
/// from a seeded random start.
///
/// For PSD input the returned value is the spectral norm estimate. Symmetry
/// is enforced when building a [`SymMat`] from raw rows.
pub fn top_eigenvector<F: Real>(m: &SymMat<F>, opts: &PowerOptions<F>) -> Result<EigenEstimate<F>> {
    let dim = m.dim();
    if dim == 0 {
        return Err(Error::InvalidArgument("matrix must be nonempty".into()));
    }
    let mut rng = rng_from_seed(opts.seed);
    let mut z: Vec<F> = normal_vector(&mut rng, dim);
    if normalize(&mut z) == F::zero() {
        z = vec![F::zero(); dim];
        z[0] = F::one();
    }
    let trace_scale = m.trace().abs() + real::<F>(1e-300);
    let mut prev: Option<F> = None;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let y = m.matvec(&z);
        let lambda = dot(&z, &y);
        let ny = norm_sq(&y).sqrt();
        if ny == F::zero() {
            // z is in the kernel; for PSD matrices reachable only when the
            // matrix is zero.
            return Ok(EigenEstimate {
                vector: z,
                value: F::zero(),
                converged: true,
                iterations,
            });
        }
        z = y;
        normalize(&mut z);
        if let Some(p) = prev {
            if (lambda - p).abs() <= opts.tol * trace_scale {
                converged = true;
                break;
            }
        }
        prev = Some(lambda);
    }
    let y = m.matvec(&z);
    let value = dot(&z, &y);
    Ok(EigenEstimate {
        vector: z,
        value,
        converged,
        iterations,
    })
}

/// Convenience wrapper validating symmetry of raw rows first.
pub fn top_eigenvector_dense<F: Real>(
    rows: &[Vec<F>],
    opts: &PowerOptions<F>,
) -> Result<EigenEstimate<F>> {
    let m = SymMat::from_rows(rows)?;
    top_eigenvector(&m, opts)
}

/// Spectral norm of a symmetric (possibly indefinite) matrix: two shifted
/// power iterations extract the extreme eigenvalues.
pub fn sym_spectral_norm<F: Real>(m: &SymMat<F>, opts: &PowerOptions<F>) -> Result<F> {
    let shift = m.frobenius();
    if shift == F::zero() {
        return Ok(F::zero());
    }
    let mut plus = m.clone();
    plus.add_diagonal(shift);
    let top = top_eigenvector(&plus, opts)?.value - shift;

    let mut minus = m.clone();
    minus.negate();
    minus.add_diagonal(shift);
    let bottom = -(top_eigenvector(&minus, opts)?.value - shift);

    Ok(top.abs().max(bottom.abs()))
}

/// Empirical covariance statistics of a point set: spectral norm, trace, and
/// stable rank `trace / spectral`.
#[derive(Debug, Clone, Copy)]
pub struct CovarianceDiagnostics<F> {
    pub spectral_norm: F,
    pub trace: F,
    pub stable_rank: F,
}

pub fn covariance_diagnostics<F: Real>(
    points: &[Vec<F>],
    opts: &PowerOptions<F>,
) -> Result<CovarianceDiagnostics<F>> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let n = points.len();
    let w = vec![F::one() / F::from_usize(n).unwrap(); n];
    let mean = weighted_mean(points, &w, F::one());
    let cov = SymMat::weighted_covariance(points, &w, &mean, F::one());
    let spectral_norm = top_eigenvector(&cov, opts)?.value.max(F::zero());
    let trace = cov.trace();
    let stable_rank = if spectral_norm > F::zero() {
        trace / spectral_norm
    } else {
        F::zero()
    };
    Ok(CovarianceDiagnostics {
        spectral_norm,
        trace,
        stable_rank,
    })
}
