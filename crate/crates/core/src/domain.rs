//! Compact convex feasible sets with exact Euclidean projection.

use rand::Rng;

use crate::linalg::{dist, norm};
use crate::optimizer::sample_uniform_ball_with;
use crate::rng::uniform_unit;
use crate::{real, Error, Real, Result};

/// The feasible set: an L2 ball or an axis-aligned box.
///
/// Both admit an exact `O(d)` projection. `diameter()` is the set's Euclidean
/// diameter, so `FeasibleDomain::ball(c, r)` has diameter `2r`.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleDomain<F> {
    Ball { center: Vec<F>, radius: F },
    Box { center: Vec<F>, half_widths: Vec<F> },
}

impl<F: Real> FeasibleDomain<F> {
    pub fn ball(center: Vec<F>, radius: F) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidArgument(
                "ball center must be nonempty".into(),
            ));
        }
        if !(radius > F::zero()) {
            return Err(Error::InvalidArgument(
                "ball radius must be positive".into(),
            ));
        }
        Ok(FeasibleDomain::Ball { center, radius })
    }

    /// Origin-centered ball in `dim` dimensions.
    pub fn centered_ball(dim: usize, radius: F) -> Result<Self> {
        Self::ball(vec![F::zero(); dim], radius)
    }

    pub fn axis_box(center: Vec<F>, half_widths: Vec<F>) -> Result<Self> {
        if center.is_empty() || center.len() != half_widths.len() {
            return Err(Error::InvalidArgument(
                "box center/half-width dimensions must match and be nonempty".into(),
            ));
        }
        if half_widths.iter().any(|h| !(*h > F::zero())) {
            return Err(Error::InvalidArgument(
                "box half-widths must be positive".into(),
            ));
        }
        Ok(FeasibleDomain::Box {
            center,
            half_widths,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleDomain::Ball { center, .. } => center.len(),
            FeasibleDomain::Box { center, .. } => center.len(),
        }
    }

    pub fn center(&self) -> &[F] {
        match self {
            FeasibleDomain::Ball { center, .. } => center,
            FeasibleDomain::Box { center, .. } => center,
        }
    }

    /// Euclidean diameter: `2r` for a ball, the full diagonal for a box.
    pub fn diameter(&self) -> F {
        match self {
            FeasibleDomain::Ball { radius, .. } => real::<F>(2.0) * *radius,
            FeasibleDomain::Box { half_widths, .. } => real::<F>(2.0) * norm(half_widths),
        }
    }

    /// Largest Euclidean norm attained on the set.
    pub fn norm_bound(&self) -> F {
        match self {
            FeasibleDomain::Ball { center, radius } => norm(center) + *radius,
            FeasibleDomain::Box {
                center,
                half_widths,
            } => {
                let mut acc = F::zero();
                for (c, h) in center.iter().zip(half_widths.iter()) {
                    let v = c.abs() + *h;
                    acc += v * v;
                }
                acc.sqrt()
            }
        }
    }

    /// Largest distance from `point` to the set.
    pub fn farthest_distance(&self, point: &[F]) -> F {
        match self {
            FeasibleDomain::Ball { center, radius } => dist(center, point) + *radius,
            FeasibleDomain::Box {
                center,
                half_widths,
            } => {
                let mut acc = F::zero();
                for ((c, h), p) in center.iter().zip(half_widths.iter()).zip(point.iter()) {
                    let v = (*c - *p).abs() + *h;
                    acc += v * v;
                }
                acc.sqrt()
            }
        }
    }

    pub fn contains(&self, w: &[F], tol: F) -> bool {
        match self {
            FeasibleDomain::Ball { center, radius } => dist(center, w) <= *radius + tol,
            FeasibleDomain::Box {
                center,
                half_widths,
            } => center
                .iter()
                .zip(half_widths.iter())
                .zip(w.iter())
                .all(|((c, h), x)| (*x - *c).abs() <= *h + tol),
        }
    }

    /// Exact Euclidean projection. Interior points come back unchanged,
    /// bit for bit.
    pub fn project(&self, y: &[F]) -> Vec<F> {
        match self {
            FeasibleDomain::Ball { center, radius } => {
                let mut delta = vec![F::zero(); center.len()];
                let mut d_sq = F::zero();
                for (d, (yi, ci)) in delta.iter_mut().zip(y.iter().zip(center.iter())) {
                    *d = *yi - *ci;
                    d_sq += *d * *d;
                }
                let d = d_sq.sqrt();
                if d <= *radius {
                    return y.to_vec();
                }
                let s = *radius / d;
                center
                    .iter()
                    .zip(delta.iter())
                    .map(|(c, d)| *c + s * *d)
                    .collect()
            }
            FeasibleDomain::Box {
                center,
                half_widths,
            } => center
                .iter()
                .zip(half_widths.iter())
                .zip(y.iter())
                .map(|((c, h), yi)| {
                    let lo = *c - *h;
                    let hi = *c + *h;
                    if *yi < lo {
                        lo
                    } else if *yi > hi {
                        hi
                    } else {
                        *yi
                    }
                })
                .collect(),
        }
    }

    /// Uniform draw from the set; used by tests and harness probes.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<F> {
        match self {
            FeasibleDomain::Ball { center, radius } => {
                let u = sample_uniform_ball_with(center.len(), *radius, rng);
                center.iter().zip(u.iter()).map(|(c, x)| *c + *x).collect()
            }
            FeasibleDomain::Box {
                center,
                half_widths,
            } => center
                .iter()
                .zip(half_widths.iter())
                .map(|(c, h)| {
                    let t: F = uniform_unit(rng);
                    *c + (real::<F>(2.0) * t - F::one()) * *h
                })
                .collect(),
        }
    }
}
