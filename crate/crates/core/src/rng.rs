//! Seeded randomness.
//!
//! Every random choice in the crate flows from an explicit 64-bit seed
//! through ChaCha8, a counter-based stream generator. Independent purposes
//! (sampling, adversaries, power iteration starts, smoothing perturbations)
//! use child seeds derived with a SplitMix64 mixer so streams never overlap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{real, Real};

/// Stream tag for power-iteration starting vectors.
pub const STREAM_POWER: u64 = 0x01;
/// Stream tag for adversary index selection and replacement draws.
pub const STREAM_ADVERSARY: u64 = 0x02;
/// Stream tag for smoothing perturbations.
pub const STREAM_SMOOTHING: u64 = 0x03;
/// Stream tag for bucketed partitioning.
pub const STREAM_BUCKETS: u64 = 0x04;
/// Stream tag for function sampling inside experiment trials.
pub const STREAM_SAMPLES: u64 = 0x05;

/// The project-wide generator: ChaCha8 seeded from a 64-bit integer.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for a tagged stream.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// Derives the seed for one (cell, trial) pair of an experiment grid.
pub fn trial_seed(base: u64, cell: u64, trial: u64) -> u64 {
    splitmix64(
        splitmix64(base ^ splitmix64(cell.wrapping_add(1)))
            ^ splitmix64(trial.wrapping_add(0x8000_0000)),
    )
}

/// Standard normal draw, produced in `f64` and converted.
#[inline]
pub fn standard_normal<F: Real, R: Rng + ?Sized>(rng: &mut R) -> F {
    let z: f64 = StandardNormal.sample(rng);
    real(z)
}

/// Uniform draw from `[0, 1)`, produced in `f64` and converted.
#[inline]
pub fn uniform_unit<F: Real, R: Rng + ?Sized>(rng: &mut R) -> F {
    real(rng.random::<f64>())
}

/// Vector of i.i.d. standard normals.
pub fn normal_vector<F: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<F> {
    (0..dim).map(|_| standard_normal(rng)).collect()
}
