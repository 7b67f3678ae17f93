//! Small dense linear algebra on slices.
//!
//! The dimensions in play are desk scale (d up to a few dozen), so everything
//! is plain loops over `Vec<F>` with no blocking or parallelism. Summation
//! order is fixed by the code, which is what makes runs bit-reproducible.

use crate::{real, Error, Real, Result};

pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc += *x * *y;
    }
    acc
}

pub fn norm_sq<F: Real>(a: &[F]) -> F {
    dot(a, a)
}

pub fn norm<F: Real>(a: &[F]) -> F {
    norm_sq(a).sqrt()
}

pub fn dist<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        let d = *x - *y;
        acc += d * d;
    }
    acc.sqrt()
}

/// `acc += c * x`, in place.
pub fn add_scaled<F: Real>(acc: &mut [F], x: &[F], c: F) {
    debug_assert_eq!(acc.len(), x.len());
    for (a, v) in acc.iter_mut().zip(x.iter()) {
        *a += c * *v;
    }
}

pub fn scale_in_place<F: Real>(v: &mut [F], c: F) {
    for x in v.iter_mut() {
        *x *= c;
    }
}

pub fn sub<F: Real>(a: &[F], b: &[F]) -> Vec<F> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| *x - *y).collect()
}

pub fn add<F: Real>(a: &[F], b: &[F]) -> Vec<F> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| *x + *y).collect()
}

/// Normalizes `v` to unit length in place; returns the original norm.
/// Leaves `v` untouched when its norm is zero.
pub fn normalize<F: Real>(v: &mut [F]) -> F {
    let n = norm(v);
    if n > F::zero() {
        scale_in_place(v, F::one() / n);
    }
    n
}

/// Weighted mean `(Σ w_i x_i) / mass` of a point set.
///
/// Accumulates deviations from the first point, so a set of identical points
/// returns that point exactly.
pub fn weighted_mean<F: Real>(points: &[Vec<F>], weights: &[F], mass: F) -> Vec<F> {
    debug_assert_eq!(points.len(), weights.len());
    let Some(base) = points.first() else {
        return Vec::new();
    };
    let dim = base.len();
    let mut acc = vec![F::zero(); dim];
    let mut diff = vec![F::zero(); dim];
    for (p, w) in points.iter().zip(weights.iter()) {
        for (d, (x, b)) in diff.iter_mut().zip(p.iter().zip(base.iter())) {
            *d = *x - *b;
        }
        add_scaled(&mut acc, &diff, *w);
    }
    if mass > F::zero() {
        scale_in_place(&mut acc, F::one() / mass);
    }
    for (a, b) in acc.iter_mut().zip(base.iter()) {
        *a += *b;
    }
    acc
}

/// Dense symmetric matrix in row-major full storage.
///
/// Construction paths fill both triangles from a single computed value, so
/// the stored data is bitwise symmetric.
#[derive(Debug, Clone)]
pub struct SymMat<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Real> SymMat<F> {
    pub fn zeros(dim: usize) -> Self {
        SymMat {
            dim,
            data: vec![F::zero(); dim * dim],
        }
    }

    /// Builds from dense rows, rejecting matrices that are not symmetric to
    /// within `1e-10 * (1 + max |entry|)`.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        let mut m = SymMat::zeros(dim);
        let mut max_abs = F::zero();
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.data[i * dim + j] = *v;
                max_abs = max_abs.max(v.abs());
            }
        }
        let tol = real::<F>(1e-10) * (F::one() + max_abs);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (m.data[i * dim + j] - m.data[j * dim + i]).abs() > tol {
                    return Err(Error::InvalidArgument(
                        "matrix is not symmetric within 1e-10".into(),
                    ));
                }
            }
        }
        Ok(m)
    }

    /// Weighted covariance `(Σ w_i (x_i - center)(x_i - center)ᵀ) / mass`.
    pub fn weighted_covariance(points: &[Vec<F>], weights: &[F], center: &[F], mass: F) -> Self {
        let dim = center.len();
        let mut m = SymMat::zeros(dim);
        let mut diff = vec![F::zero(); dim];
        for (p, w) in points.iter().zip(weights.iter()) {
            if *w == F::zero() {
                continue;
            }
            for (d, (x, c)) in diff.iter_mut().zip(p.iter().zip(center.iter())) {
                *d = *x - *c;
            }
            for (i, di) in diff.iter().enumerate() {
                let wi = *w * *di;
                for (j, dj) in diff.iter().enumerate().skip(i) {
                    m.data[i * dim + j] += wi * *dj;
                }
            }
        }
        if mass > F::zero() {
            let inv = F::one() / mass;
            for i in 0..dim {
                for j in i..dim {
                    let v = m.data[i * dim + j] * inv;
                    m.data[i * dim + j] = v;
                    m.data[j * dim + i] = v;
                }
            }
        } else {
            m.mirror_upper();
        }
        m
    }

    fn mirror_upper(&mut self) {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                self.data[j * self.dim + i] = self.data[i * self.dim + j];
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// `self += c * I`.
    pub fn add_diagonal(&mut self, c: F) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += c;
        }
    }

    /// `self = -self` entrywise.
    pub fn negate(&mut self) {
        for v in self.data.iter_mut() {
            *v = -*v;
        }
    }

    pub fn matvec(&self, v: &[F]) -> Vec<F> {
        debug_assert_eq!(v.len(), self.dim);
        let mut out = vec![F::zero(); self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            *o = dot(row, v);
        }
        out
    }

    pub fn trace(&self) -> F {
        let mut acc = F::zero();
        for i in 0..self.dim {
            acc += self.data[i * self.dim + i];
        }
        acc
    }

    pub fn frobenius(&self) -> F {
        norm(&self.data)
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, v| acc.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_covariance_of_identical_points_is_zero() {
        let points = vec![vec![2.0_f64, -1.0]; 5];
        let w = vec![0.2; 5];
        let center = vec![2.0, -1.0];
        let m = SymMat::weighted_covariance(&points, &w, &center, 1.0);
        assert_eq!(m.max_abs(), 0.0);
    }

    #[test]
    fn from_rows_rejects_asymmetric() {
        let rows = vec![vec![1.0_f64, 0.5], vec![0.0, 1.0]];
        assert!(SymMat::from_rows(&rows).is_err());
    }

    #[test]
    fn matvec_matches_hand_computation() {
        let rows = vec![vec![2.0_f64, 1.0], vec![1.0, 3.0]];
        let m = SymMat::from_rows(&rows).unwrap();
        assert_eq!(m.matvec(&[1.0, -1.0]), vec![1.0, -2.0]);
        assert_eq!(m.trace(), 5.0);
    }
}
