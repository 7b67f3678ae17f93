//! Loss-function families with closed-form population risk.
//!
//! Each family fixes a distribution over convex sample losses together with
//! its feasible set, and exposes the population risk, its gradient, the exact
//! population minimum, and the regularity constants the solvers consume:
//! `sigma` (spectral bound on the gradient covariance), `smoothness` and
//! `lipschitz` of the population risk (either may be absent), and the
//! noncentral second-moment bound.
//!
//! The spike and product families are the hard instances that pin the error
//! floor: the spike family lives on the interval `|w| <= radius` (embedded in
//! higher dimension along the first coordinate), the product family on the
//! ball of a given diameter.

use rand::Rng;

use crate::domain::FeasibleDomain;
use crate::linalg::{dot, norm, sub};
use crate::rng::{normal_vector, rng_from_seed, standard_normal, uniform_unit};
use crate::{real, Error, Real, Result};

/// Which spike law a spike instance draws from.
///
/// Both put mass `1 - mass` at zero and the rest at `sigma / sqrt(mass)`:
/// `Centered` splits it evenly between the two signs (mean 0, variance
/// `sigma^2`), `Biased` puts all of it on the positive side (mean
/// `sigma * sqrt(mass)`, variance `sigma^2 * (1 - mass)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikeVariant {
    Centered,
    Biased,
}

#[derive(Debug, Clone)]
pub(crate) enum Family<F> {
    /// `f_x(w) = -<w, x>` with `x ~ N(mean, noise^2 I)`.
    Linear { mean: Vec<F>, noise: F },
    /// `f_x(w) = (curvature/2) ||w - target||^2 - <x, w>` with `x ~ N(0, noise^2 I)`.
    Quadratic {
        target: Vec<F>,
        curvature: F,
        noise: F,
    },
    /// `f_x(w) = -(x/2) ||w||^2` with `x ~ N(scale_mean, scale_noise^2)`.
    /// Individual draws can have arbitrarily large curvature even though the
    /// population risk is `|scale_mean|`-smooth.
    ScaledQuadratic {
        scale_mean: F,
        scale_noise: F,
        dim: usize,
    },
    /// `f_a(w) = ||w - a||` with `a` drawn from a finite atom list.
    /// Nonsmooth population risk; Lipschitz constant 1.
    Norm { atoms: Vec<(F, Vec<F>)> },
    /// `f_x(w) = -w_1 * x` with scalar `x` from the spike law, embedded in
    /// `dim` dimensions.
    Spike {
        sigma: F,
        mass: F,
        variant: SpikeVariant,
        dim: usize,
    },
    /// `f_x(w) = -<w, x>` with independent `x_j = ±sigma`, biased per
    /// coordinate by `bias * signs_j / sqrt(d)`.
    Product { signs: Vec<F>, bias: F, sigma: F },
}

/// A sampleable family of losses over a fixed feasible set.
#[derive(Debug, Clone)]
pub struct FunctionDistribution<F> {
    family: Family<F>,
    domain: FeasibleDomain<F>,
}

/// One drawn loss function; exposes value and gradient anywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleFunction<F> {
    /// `f(w) = -<w, x>`; gradient `-x` everywhere. Also serves as the
    /// constant-gradient replacement used by adversaries.
    Linear { x: Vec<F> },
    /// `f(w) = (curvature/2)||w - target||^2 - <tilt, w>`.
    Quadratic {
        target: Vec<F>,
        curvature: F,
        tilt: Vec<F>,
    },
    /// `f(w) = -(scale/2)||w||^2`.
    ScaledQuadratic { scale: F, dim: usize },
    /// `f(w) = ||w - center||`.
    Norm { center: Vec<F> },
    /// `f(w) = -w_1 * value`.
    Spike { value: F, dim: usize },
    /// `f(w) = inner(w + offset)`; produced by convolutional smoothing.
    Shifted {
        inner: Box<SampleFunction<F>>,
        offset: Vec<F>,
    },
}

/// Regularity constants a solver needs: the gradient-covariance bound, and
/// whichever of population smoothness / Lipschitz / noncentral bound exist.
#[derive(Debug, Clone, Copy)]
pub struct RiskConstants<F> {
    pub sigma: F,
    pub smoothness: Option<F>,
    pub lipschitz: Option<F>,
    pub noncentral: Option<F>,
}

impl<F: Real> SampleFunction<F> {
    pub fn dim(&self) -> usize {
        match self {
            SampleFunction::Linear { x } => x.len(),
            SampleFunction::Quadratic { target, .. } => target.len(),
            SampleFunction::ScaledQuadratic { dim, .. } => *dim,
            SampleFunction::Norm { center } => center.len(),
            SampleFunction::Spike { dim, .. } => *dim,
            SampleFunction::Shifted { inner, .. } => inner.dim(),
        }
    }

    pub fn value(&self, w: &[F]) -> F {
        match self {
            SampleFunction::Linear { x } => -dot(w, x),
            SampleFunction::Quadratic {
                target,
                curvature,
                tilt,
            } => {
                let d = sub(w, target);
                *curvature / real::<F>(2.0) * dot(&d, &d) - dot(tilt, w)
            }
            SampleFunction::ScaledQuadratic { scale, .. } => -*scale / real::<F>(2.0) * dot(w, w),
            SampleFunction::Norm { center } => norm(&sub(w, center)),
            SampleFunction::Spike { value, .. } => -w[0] * *value,
            SampleFunction::Shifted { inner, offset } => {
                let shifted: Vec<F> = w.iter().zip(offset.iter()).map(|(a, b)| *a + *b).collect();
                inner.value(&shifted)
            }
        }
    }

    pub fn gradient(&self, w: &[F]) -> Vec<F> {
        match self {
            SampleFunction::Linear { x } => x.iter().map(|v| -*v).collect(),
            SampleFunction::Quadratic {
                target,
                curvature,
                tilt,
            } => w
                .iter()
                .zip(target.iter())
                .zip(tilt.iter())
                .map(|((wi, ti), gi)| *curvature * (*wi - *ti) - *gi)
                .collect(),
            SampleFunction::ScaledQuadratic { scale, .. } => {
                w.iter().map(|wi| -*scale * *wi).collect()
            }
            SampleFunction::Norm { center } => {
                let d = sub(w, center);
                let n = norm(&d);
                if n == F::zero() {
                    // Subgradient choice at the kink.
                    vec![F::zero(); w.len()]
                } else {
                    d.iter().map(|v| *v / n).collect()
                }
            }
            SampleFunction::Spike { value, dim } => {
                let mut g = vec![F::zero(); *dim];
                g[0] = -*value;
                g
            }
            SampleFunction::Shifted { inner, offset } => {
                let shifted: Vec<F> = w.iter().zip(offset.iter()).map(|(a, b)| *a + *b).collect();
                inner.gradient(&shifted)
            }
        }
    }

    /// Wraps the function as `w -> f(w + offset)`.
    pub fn shifted(self, offset: Vec<F>) -> Self {
        SampleFunction::Shifted {
            inner: Box::new(self),
            offset,
        }
    }
}

impl<F: Real> FunctionDistribution<F> {
    pub fn linear_loss(mean: Vec<F>, noise: F, domain: FeasibleDomain<F>) -> Result<Self> {
        if mean.len() != domain.dim() {
            return Err(Error::InvalidArgument(
                "mean dimension must match domain".into(),
            ));
        }
        if noise < F::zero() {
            return Err(Error::InvalidArgument("noise must be nonnegative".into()));
        }
        Ok(Self {
            family: Family::Linear { mean, noise },
            domain,
        })
    }

    pub fn quadratic(
        target: Vec<F>,
        curvature: F,
        noise: F,
        domain: FeasibleDomain<F>,
    ) -> Result<Self> {
        if target.len() != domain.dim() {
            return Err(Error::InvalidArgument(
                "target dimension must match domain".into(),
            ));
        }
        if !(curvature > F::zero()) {
            return Err(Error::InvalidArgument("curvature must be positive".into()));
        }
        if noise < F::zero() {
            return Err(Error::InvalidArgument("noise must be nonnegative".into()));
        }
        Ok(Self {
            family: Family::Quadratic {
                target,
                curvature,
                noise,
            },
            domain,
        })
    }

    pub fn scaled_quadratic(
        scale_mean: F,
        scale_noise: F,
        domain: FeasibleDomain<F>,
    ) -> Result<Self> {
        if scale_mean > F::zero() {
            return Err(Error::InvalidArgument(
                "scale mean must be nonpositive for a convex population risk".into(),
            ));
        }
        if scale_noise < F::zero() {
            return Err(Error::InvalidArgument(
                "scale noise must be nonnegative".into(),
            ));
        }
        let dim = domain.dim();
        Ok(Self {
            family: Family::ScaledQuadratic {
                scale_mean,
                scale_noise,
                dim,
            },
            domain,
        })
    }

    /// Point-mass norm loss `f(w) = ||w - center||`.
    pub fn norm_loss(center: Vec<F>, domain: FeasibleDomain<F>) -> Result<Self> {
        Self::norm_mixture(vec![(F::one(), center)], domain)
    }

    /// Mixture of norm losses. The population risk stays closed-form, but the
    /// population minimum does not once there is more than one atom.
    pub fn norm_mixture(atoms: Vec<(F, Vec<F>)>, domain: FeasibleDomain<F>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument(
                "norm mixture needs at least one atom".into(),
            ));
        }
        let mut total = F::zero();
        for (p, a) in &atoms {
            if !(*p > F::zero()) {
                return Err(Error::InvalidArgument(
                    "atom weights must be positive".into(),
                ));
            }
            if a.len() != domain.dim() {
                return Err(Error::InvalidArgument(
                    "atom dimension must match domain".into(),
                ));
            }
            total += *p;
        }
        if (total - F::one()).abs() > real(1e-9) {
            return Err(Error::InvalidArgument(
                "atom weights must sum to one".into(),
            ));
        }
        Ok(Self {
            family: Family::Norm { atoms },
            domain,
        })
    }

    /// One-dimensional spike instance on the interval `|w| <= radius`.
    ///
    /// `mass` is the spike probability; draws take value 0 with probability
    /// `1 - mass` and `sigma / sqrt(mass)` (split across signs for
    /// `Centered`) otherwise.
    pub fn spike_1d(sigma: F, mass: F, radius: F, variant: SpikeVariant) -> Result<Self> {
        Self::spike_embedded(sigma, mass, radius, variant, 1)
    }

    /// Spike instance embedded along the first coordinate of a
    /// `dim`-dimensional ball of radius `radius`.
    pub fn spike_embedded(
        sigma: F,
        mass: F,
        radius: F,
        variant: SpikeVariant,
        dim: usize,
    ) -> Result<Self> {
        if !(mass > F::zero() && mass < F::one()) {
            return Err(Error::InvalidArgument(
                "spike mass must lie in (0, 1)".into(),
            ));
        }
        if !(sigma > F::zero()) {
            return Err(Error::InvalidArgument("sigma must be positive".into()));
        }
        let domain = FeasibleDomain::centered_ball(dim, radius)?;
        Ok(Self {
            family: Family::Spike {
                sigma,
                mass,
                variant,
                dim,
            },
            domain,
        })
    }

    /// Product instance: independent `±sigma` coordinates with per-coordinate
    /// bias `bias * signs_j / sqrt(d)`, on the ball of the given diameter.
    pub fn product_instance(signs: Vec<F>, bias: F, sigma: F, diameter: F) -> Result<Self> {
        let d = signs.len();
        if d == 0 {
            return Err(Error::InvalidArgument("signs must be nonempty".into()));
        }
        if signs.iter().any(|s| s.abs() != F::one()) {
            return Err(Error::InvalidArgument("signs must be ±1".into()));
        }
        if !(sigma > F::zero()) {
            return Err(Error::InvalidArgument("sigma must be positive".into()));
        }
        let root_d = real::<F>(d as f64).sqrt();
        if !(bias.abs() / root_d < F::one()) {
            return Err(Error::InvalidArgument(
                "bias / sqrt(d) must have magnitude below one".into(),
            ));
        }
        let radius = diameter / real::<F>(2.0);
        let domain = FeasibleDomain::centered_ball(d, radius)?;
        Ok(Self {
            family: Family::Product { signs, bias, sigma },
            domain,
        })
    }

    pub fn domain(&self) -> &FeasibleDomain<F> {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Per-coordinate bias vector of the product instance's coordinate law.
    pub fn product_coordinate_bias(&self) -> Option<Vec<F>> {
        match &self.family {
            Family::Product { signs, bias, .. } => {
                let root_d = real::<F>(signs.len() as f64).sqrt();
                Some(signs.iter().map(|s| *bias * *s / root_d).collect())
            }
            _ => None,
        }
    }

    /// Mean of the scalar spike law.
    pub fn spike_mean(&self) -> Option<F> {
        match &self.family {
            Family::Spike {
                sigma,
                mass,
                variant,
                ..
            } => Some(match variant {
                SpikeVariant::Centered => F::zero(),
                SpikeVariant::Biased => *sigma * mass.sqrt(),
            }),
            _ => None,
        }
    }

    /// Variance of the scalar spike law.
    pub fn spike_variance(&self) -> Option<F> {
        match &self.family {
            Family::Spike {
                sigma,
                mass,
                variant,
                ..
            } => Some(match variant {
                SpikeVariant::Centered => *sigma * *sigma,
                SpikeVariant::Biased => *sigma * *sigma * (F::one() - *mass),
            }),
            _ => None,
        }
    }

    /// Draws `n` i.i.d. sample functions; deterministic in `(self, n, seed)`.
    pub fn sample_functions(&self, n: usize, seed: u64) -> Result<Vec<SampleFunction<F>>> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "sample count must be at least one".into(),
            ));
        }
        let mut rng = rng_from_seed(seed);
        Ok((0..n).map(|_| self.sample_one(&mut rng)).collect())
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> SampleFunction<F> {
        match &self.family {
            Family::Linear { mean, noise } => {
                let z: Vec<F> = normal_vector(rng, mean.len());
                let x = mean
                    .iter()
                    .zip(z.iter())
                    .map(|(m, zi)| *m + *noise * *zi)
                    .collect();
                SampleFunction::Linear { x }
            }
            Family::Quadratic {
                target,
                curvature,
                noise,
            } => {
                let z: Vec<F> = normal_vector(rng, target.len());
                let tilt = z.iter().map(|zi| *noise * *zi).collect();
                SampleFunction::Quadratic {
                    target: target.clone(),
                    curvature: *curvature,
                    tilt,
                }
            }
            Family::ScaledQuadratic {
                scale_mean,
                scale_noise,
                dim,
            } => {
                let z: F = standard_normal(rng);
                SampleFunction::ScaledQuadratic {
                    scale: *scale_mean + *scale_noise * z,
                    dim: *dim,
                }
            }
            Family::Norm { atoms } => {
                let u: F = uniform_unit(rng);
                let mut acc = F::zero();
                let mut chosen = &atoms[atoms.len() - 1].1;
                for (p, a) in atoms {
                    acc += *p;
                    if u < acc {
                        chosen = a;
                        break;
                    }
                }
                SampleFunction::Norm {
                    center: chosen.clone(),
                }
            }
            Family::Spike {
                sigma,
                mass,
                variant,
                dim,
            } => {
                let u: F = uniform_unit(rng);
                let spike = *sigma / mass.sqrt();
                let value = if u >= *mass {
                    F::zero()
                } else {
                    match variant {
                        SpikeVariant::Biased => spike,
                        SpikeVariant::Centered => {
                            if u < *mass / real(2.0) {
                                spike
                            } else {
                                -spike
                            }
                        }
                    }
                };
                SampleFunction::Spike { value, dim: *dim }
            }
            Family::Product { signs, bias, sigma } => {
                let root_d = real::<F>(signs.len() as f64).sqrt();
                let x = signs
                    .iter()
                    .map(|s| {
                        let delta = *bias * *s / root_d;
                        let p_plus = (F::one() + delta) / real(2.0);
                        let u: F = uniform_unit(rng);
                        if u < p_plus {
                            *sigma
                        } else {
                            -*sigma
                        }
                    })
                    .collect();
                SampleFunction::Linear { x }
            }
        }
    }

    /// Closed-form population risk at `w`.
    pub fn population_risk(&self, w: &[F]) -> Result<F> {
        match &self.family {
            Family::Linear { mean, .. } => Ok(-dot(w, mean)),
            Family::Quadratic {
                target, curvature, ..
            } => {
                let d = sub(w, target);
                Ok(*curvature / real::<F>(2.0) * dot(&d, &d))
            }
            Family::ScaledQuadratic { scale_mean, .. } => {
                Ok(-*scale_mean / real::<F>(2.0) * dot(w, w))
            }
            Family::Norm { atoms } => {
                let mut acc = F::zero();
                for (p, a) in atoms {
                    acc += *p * norm(&sub(w, a));
                }
                Ok(acc)
            }
            Family::Spike { .. } => Ok(-w[0] * self.spike_mean().unwrap()),
            Family::Product { sigma, .. } => {
                let delta = self.product_coordinate_bias().unwrap();
                let mut acc = F::zero();
                for (wi, di) in w.iter().zip(delta.iter()) {
                    acc += *wi * *sigma * *di;
                }
                Ok(-acc)
            }
        }
    }

    /// Closed-form population gradient at `w`.
    pub fn population_gradient(&self, w: &[F]) -> Result<Vec<F>> {
        match &self.family {
            Family::Linear { mean, .. } => Ok(mean.iter().map(|m| -*m).collect()),
            Family::Quadratic {
                target, curvature, ..
            } => Ok(w
                .iter()
                .zip(target.iter())
                .map(|(wi, ti)| *curvature * (*wi - *ti))
                .collect()),
            Family::ScaledQuadratic { scale_mean, .. } => {
                Ok(w.iter().map(|wi| -*scale_mean * *wi).collect())
            }
            Family::Norm { atoms } => {
                let mut g = vec![F::zero(); w.len()];
                for (p, a) in atoms {
                    let d = sub(w, a);
                    let n = norm(&d);
                    if n > F::zero() {
                        for (gi, di) in g.iter_mut().zip(d.iter()) {
                            *gi += *p * *di / n;
                        }
                    }
                }
                Ok(g)
            }
            Family::Spike { dim, .. } => {
                let mut g = vec![F::zero(); *dim];
                g[0] = -self.spike_mean().unwrap();
                Ok(g)
            }
            Family::Product { sigma, .. } => {
                let delta = self.product_coordinate_bias().unwrap();
                Ok(delta.iter().map(|d| -*sigma * *d).collect())
            }
        }
    }

    /// Exact minimum of the population risk over the feasible set.
    pub fn population_min_risk(&self) -> Result<F> {
        match &self.family {
            Family::Linear { mean, .. } => Ok(self.linear_min(mean)),
            Family::Quadratic {
                target, curvature, ..
            } => {
                let p = self.domain.project(target);
                let d = sub(&p, target);
                Ok(*curvature / real::<F>(2.0) * dot(&d, &d))
            }
            Family::ScaledQuadratic { scale_mean, .. } => {
                let origin = vec![F::zero(); self.dim()];
                let p = self.domain.project(&origin);
                Ok(-*scale_mean / real::<F>(2.0) * dot(&p, &p))
            }
            Family::Norm { atoms } => {
                if atoms.len() == 1 {
                    let a = &atoms[0].1;
                    let p = self.domain.project(a);
                    Ok(norm(&sub(&p, a)))
                } else {
                    Err(Error::UnsupportedFamily(
                        "norm mixtures with several atoms have no closed-form minimum".into(),
                    ))
                }
            }
            Family::Spike { .. } => {
                // Linear in w_1 over a centered ball.
                let m = self.spike_mean().unwrap();
                let radius = self.domain.diameter() / real(2.0);
                Ok(-radius * m.abs())
            }
            Family::Product { sigma, .. } => {
                let delta = self.product_coordinate_bias().unwrap();
                let g: Vec<F> = delta.iter().map(|d| *sigma * *d).collect();
                let radius = self.domain.diameter() / real(2.0);
                Ok(-radius * norm(&g))
            }
        }
    }

    fn linear_min(&self, mean: &[F]) -> F {
        match &self.domain {
            FeasibleDomain::Ball { center, radius } => -dot(center, mean) - *radius * norm(mean),
            FeasibleDomain::Box {
                center,
                half_widths,
            } => {
                let mut acc = F::zero();
                for ((c, h), m) in center.iter().zip(half_widths.iter()).zip(mean.iter()) {
                    acc += -*c * *m - *h * m.abs();
                }
                acc
            }
        }
    }

    /// Spectral bound on the gradient covariance, valid at every feasible `w`.
    pub fn sigma_bound(&self) -> F {
        match &self.family {
            Family::Linear { noise, .. } => *noise,
            Family::Quadratic { noise, .. } => *noise,
            Family::ScaledQuadratic { scale_noise, .. } => *scale_noise * self.domain.norm_bound(),
            Family::Norm { atoms } => {
                if atoms.len() == 1 {
                    F::zero()
                } else {
                    // Gradients are unit vectors, so every projected second
                    // moment is at most one.
                    F::one()
                }
            }
            Family::Spike { sigma, .. } => *sigma,
            Family::Product { sigma, .. } => *sigma,
        }
    }

    /// Smoothness of the population risk, when finite.
    pub fn smoothness(&self) -> Option<F> {
        match &self.family {
            Family::Linear { .. } => Some(F::zero()),
            Family::Quadratic { curvature, .. } => Some(*curvature),
            Family::ScaledQuadratic { scale_mean, .. } => Some(scale_mean.abs()),
            Family::Norm { .. } => None,
            Family::Spike { .. } => Some(F::zero()),
            Family::Product { .. } => Some(F::zero()),
        }
    }

    /// Lipschitz constant of the population risk over the feasible set.
    pub fn lipschitz(&self) -> Option<F> {
        match &self.family {
            Family::Linear { mean, .. } => Some(norm(mean)),
            Family::Quadratic {
                target, curvature, ..
            } => Some(*curvature * self.domain.farthest_distance(target)),
            Family::ScaledQuadratic { scale_mean, .. } => {
                Some(scale_mean.abs() * self.domain.norm_bound())
            }
            Family::Norm { .. } => Some(F::one()),
            Family::Spike { .. } => self.spike_mean().map(|m| m.abs()),
            Family::Product { sigma, bias, .. } => Some(*sigma * bias.abs()),
        }
    }

    /// Bound on the noncentral projected second moment of sample gradients.
    pub fn noncentral_bound(&self) -> Option<F> {
        match &self.family {
            Family::Linear { mean, noise } => Some((dot(mean, mean) + *noise * *noise).sqrt()),
            Family::Quadratic {
                target,
                curvature,
                noise,
            } => {
                let l = *curvature * self.domain.farthest_distance(target);
                Some((l * l + *noise * *noise).sqrt())
            }
            Family::ScaledQuadratic {
                scale_mean,
                scale_noise,
                ..
            } => {
                let second = *scale_mean * *scale_mean + *scale_noise * *scale_noise;
                Some(second.sqrt() * self.domain.norm_bound())
            }
            Family::Norm { .. } => Some(F::one()),
            Family::Spike { sigma, .. } => Some(*sigma),
            Family::Product { sigma, .. } => Some(*sigma),
        }
    }

    pub fn constants(&self) -> RiskConstants<F> {
        RiskConstants {
            sigma: self.sigma_bound(),
            smoothness: self.smoothness(),
            lipschitz: self.lipschitz(),
            noncentral: self.noncentral_bound(),
        }
    }
}
