//! Implicit coordinate-grid net.
//!
//! A `fineness`-net is realized by grid points spaced `fineness / sqrt(d)`
//! per coordinate, so the nearest net point of any query is found in `O(d)`
//! by scale, round, rescale — no net is ever materialized. Rounding moves
//! each coordinate by at most half a spacing, so the net point is within
//! `fineness / 2` of the query.

use crate::{real, Error, Real, Result};

#[derive(Debug, Clone, Copy)]
pub struct NetConfig<F> {
    /// Covering radius of the net. May be infinite, in which case the net
    /// collapses to the origin (used when the gradient field is constant and
    /// a single evaluation point suffices).
    pub fineness: F,
    pub dim: usize,
}

impl<F: Real> NetConfig<F> {
    pub fn new(fineness: F, dim: usize) -> Result<Self> {
        if !(fineness > F::zero()) {
            return Err(Error::InvalidArgument(
                "net fineness must be positive".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "net dimension must be positive".into(),
            ));
        }
        Ok(NetConfig { fineness, dim })
    }

    /// Per-coordinate spacing `fineness / sqrt(d)`.
    pub fn spacing(&self) -> F {
        self.fineness / real::<F>(self.dim as f64).sqrt()
    }
}

/// Integer grid coordinates of the nearest net point; the memoization key.
pub fn net_coordinates<F: Real>(net: &NetConfig<F>, w: &[F]) -> Result<Vec<i64>> {
    if w.len() != net.dim {
        return Err(Error::InvalidArgument(
            "query dimension must match the net".into(),
        ));
    }
    let spacing = net.spacing();
    if spacing.is_infinite() {
        return Ok(vec![0; net.dim]);
    }
    w.iter()
        .map(|x| {
            (*x / spacing)
                .round()
                .to_i64()
                .ok_or_else(|| Error::InvalidArgument("grid coordinate overflow".into()))
        })
        .collect()
}

/// Nearest net point of `w`: divide by the spacing, round each coordinate to
/// the nearest integer, multiply back. `O(d)` regardless of net cardinality.
pub fn nearest_net_point<F: Real>(net: &NetConfig<F>, w: &[F]) -> Result<Vec<F>> {
    let coords = net_coordinates(net, w)?;
    let spacing = net.spacing();
    if spacing.is_infinite() {
        return Ok(vec![F::zero(); net.dim]);
    }
    Ok(coords
        .into_iter()
        .map(|c| real::<F>(c as f64) * spacing)
        .collect())
}
