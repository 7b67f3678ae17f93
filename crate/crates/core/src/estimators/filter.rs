//! Iterative filtering for robust mean estimation.

use rand::seq::SliceRandom;

use super::spectral::{top_eigenvector, PowerOptions};
use super::stability_delta;
use crate::linalg::{norm_sq, weighted_mean, SymMat};
use crate::rng::{derive_seed, rng_from_seed, STREAM_BUCKETS};
use crate::{real, Error, Real, Result};

/// Filtering controls.
///
/// The working contamination level is
/// `eps' = min(contamination_scale * epsilon + tail_scale * ln(1/tau) / n, effective_cap)`,
/// and the loop keeps downweighting while the retained mass is at least
/// `1 - 2 eps'`. Inputs with `epsilon >= breakdown_epsilon` are rejected:
/// there the uncapped rule would allow discarding more than half of the mass.
#[derive(Debug, Clone)]
pub struct FilterConfig<F> {
    pub epsilon: F,
    pub tau: F,
    pub contamination_scale: F,
    pub tail_scale: F,
    pub effective_cap: F,
    pub breakdown_epsilon: F,
    /// Bypasses the rule entirely when set; used when the caller knows the
    /// working level it wants.
    pub effective_override: Option<F>,
    /// The loop exits early once the top covariance eigenvalue falls to
    /// `degenerate_variance_tol * (1 + ||mean||^2)`.
    pub degenerate_variance_tol: F,
    pub power: PowerOptions<F>,
}

impl<F: Real> FilterConfig<F> {
    pub fn new(epsilon: F, tau: F) -> Result<Self> {
        if !(epsilon >= F::zero()) {
            return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
        }
        if !(tau > F::zero() && tau < F::one()) {
            return Err(Error::InvalidArgument("tau must lie in (0, 1)".into()));
        }
        Ok(FilterConfig {
            epsilon,
            tau,
            contamination_scale: real(2.0),
            tail_scale: real(2.0),
            effective_cap: F::one() / real(6.0),
            breakdown_epsilon: real(0.25),
            effective_override: None,
            degenerate_variance_tol: real(1e-12),
            power: PowerOptions::new(),
        })
    }

    /// Working contamination level for `n` samples.
    pub fn effective_contamination(&self, n: usize) -> Result<F> {
        if let Some(o) = self.effective_override {
            if !(o > F::zero() && o < F::one() / real(2.0)) {
                return Err(Error::InvalidArgument(
                    "effective contamination override must lie in (0, 1/2)".into(),
                ));
            }
            return Ok(o);
        }
        if self.epsilon >= self.breakdown_epsilon {
            return Err(Error::BreakdownExceeded(format!(
                "epsilon {} is at or above the filter's tolerance {}",
                self.epsilon, self.breakdown_epsilon
            )));
        }
        let nf = real::<F>(n as f64);
        let raw = self.contamination_scale * self.epsilon
            + self.tail_scale * (F::one() / self.tau).ln() / nf;
        Ok(raw.min(self.effective_cap))
    }
}

/// Per-sample weights, nonincreasing from the uniform start `1/n`.
#[derive(Debug, Clone)]
pub struct WeightVector<F> {
    weights: Vec<F>,
    mass: F,
}

impl<F: Real> WeightVector<F> {
    pub fn uniform(n: usize) -> Self {
        let w = F::one() / F::from_usize(n).unwrap();
        let weights = vec![w; n];
        let mass = sum(&weights);
        WeightVector { weights, mass }
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn mass(&self) -> F {
        self.mass
    }

    fn recompute_mass(&mut self) {
        self.mass = sum(&self.weights);
    }
}

fn sum<F: Real>(v: &[F]) -> F {
    let mut acc = F::zero();
    for x in v {
        acc += *x;
    }
    acc
}

/// One row of the filtering trace.
#[derive(Debug, Clone, Copy)]
pub struct FilterIteration<F> {
    pub iteration: usize,
    /// Retained mass after this iteration's update.
    pub mass: F,
    pub top_eigenvalue: F,
    /// Score threshold `t` defining the downweighted tail.
    pub threshold: F,
    /// Largest supported tail score `m`; the divisor of the update.
    pub max_score: F,
    pub removed_mass: F,
}

/// Filtering outcome: the robust mean estimate plus everything needed to
/// audit the run.
#[derive(Debug, Clone)]
pub struct FilterReport<F> {
    pub estimate: Vec<F>,
    pub weights: WeightVector<F>,
    pub iterations: usize,
    /// Top covariance eigenvalue at the final weights.
    pub final_top_eigenvalue: F,
    pub effective_contamination: F,
    /// True when the loop exited through the zero-variance / zero-score
    /// guard rather than the mass floor.
    pub degenerate_exit: bool,
    pub trace: Vec<FilterIteration<F>>,
}

/// Robust mean of a point set by iterative filtering.
///
/// While the retained mass is at least `1 - 2 eps'`: compute the weighted
/// mean and covariance, score each point by its squared projection on the
/// top covariance eigenvector, pick the largest threshold `t` whose tail
/// holds at least `eps'` mass, and downweight the tail multiplicatively by
/// `1 - score/m` where `m` is the largest supported tail score. Exits early
/// when the covariance degenerates or all tail scores vanish.
pub fn filter_mean<F: Real>(
    points: &[Vec<F>],
    config: &FilterConfig<F>,
) -> Result<FilterReport<F>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "filtering needs at least two points".into(),
        ));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidArgument(
            "points must share a positive dimension".into(),
        ));
    }
    if points.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
        return Err(Error::InvalidArgument("points must be finite".into()));
    }
    let eps_prime = config.effective_contamination(n)?;
    let floor = F::one() - real::<F>(2.0) * eps_prime;

    let mut h = WeightVector::uniform(n);
    let mut trace = Vec::new();
    let mut degenerate = false;
    let mut iterations = 0usize;
    let mut scores = vec![F::zero(); n];

    while h.mass() >= floor {
        // Each pass zeroes at least one supported point, so n passes is a
        // hard ceiling; the guard is defensive.
        if iterations >= n {
            break;
        }
        iterations += 1;

        let mean = weighted_mean(points, h.weights(), h.mass());
        let cov = SymMat::weighted_covariance(points, h.weights(), &mean, h.mass());
        let power = PowerOptions {
            seed: derive_seed(config.power.seed, iterations as u64),
            ..config.power
        };
        let eig = top_eigenvector(&cov, &power)?;
        let lambda = eig.value.max(F::zero());
        if lambda <= config.degenerate_variance_tol * (F::one() + norm_sq(&mean)) {
            degenerate = true;
            break;
        }

        for (s, p) in scores.iter_mut().zip(points.iter()) {
            let mut proj = F::zero();
            for ((x, c), v) in p.iter().zip(mean.iter()).zip(eig.vector.iter()) {
                proj += (*x - *c) * *v;
            }
            *s = proj * proj;
        }

        // Largest t whose tail {score >= t} carries at least eps' weight.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|a, b| scores[*b].partial_cmp(&scores[*a]).unwrap().then(a.cmp(b)));
        let mut cum = F::zero();
        let mut threshold = F::zero();
        for &i in &order {
            cum += h.weights()[i];
            if cum >= eps_prime {
                threshold = scores[i];
                break;
            }
        }

        let mut max_score = F::zero();
        for (w, s) in h.weights.iter().zip(scores.iter()) {
            if *w > F::zero() && *s >= threshold {
                max_score = max_score.max(*s);
            }
        }
        if max_score <= F::zero() {
            degenerate = true;
            break;
        }

        let mass_before = h.mass();
        for (w, s) in h.weights.iter_mut().zip(scores.iter()) {
            if *s >= threshold && *w > F::zero() {
                *w *= F::one() - *s / max_score;
            }
        }
        h.recompute_mass();

        trace.push(FilterIteration {
            iteration: iterations,
            mass: h.mass(),
            top_eigenvalue: lambda,
            threshold,
            max_score,
            removed_mass: mass_before - h.mass(),
        });
    }

    let estimate = weighted_mean(points, h.weights(), h.mass());
    let final_top_eigenvalue = if h.mass() > F::zero() {
        let cov = SymMat::weighted_covariance(points, h.weights(), &estimate, h.mass());
        top_eigenvector(&cov, &config.power)?.value.max(F::zero())
    } else {
        F::zero()
    };

    Ok(FilterReport {
        estimate,
        weights: h,
        iterations,
        final_top_eigenvalue,
        effective_contamination: eps_prime,
        degenerate_exit: degenerate,
        trace,
    })
}

/// Bucketed preprocessing: randomly partition into `k = floor(eps' n)`
/// buckets of size `floor(n/k)` (the ragged remainder is dropped), average
/// within buckets, then filter the bucket means.
pub fn bucketed_filter_mean<F: Real>(
    points: &[Vec<F>],
    config: &FilterConfig<F>,
    seed: u64,
) -> Result<FilterReport<F>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "bucketing needs at least two points".into(),
        ));
    }
    let eps_prime = config.effective_contamination(n)?;
    let k = ((eps_prime.to_f64().unwrap_or(0.0) * n as f64) + 1e-9).floor() as usize;
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "bucket rule gives k = {k}; need at least 2 buckets (n too small)"
        )));
    }
    let size = n / k;
    let dim = points[0].len();

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = rng_from_seed(derive_seed(seed, STREAM_BUCKETS));
    indices.shuffle(&mut rng);

    let inv = F::one() / F::from_usize(size).unwrap();
    let mut means = Vec::with_capacity(k);
    for bucket in indices.chunks_exact(size).take(k) {
        let mut acc = vec![F::zero(); dim];
        for &i in bucket {
            for (a, x) in acc.iter_mut().zip(points[i].iter()) {
                *a += *x;
            }
        }
        for a in acc.iter_mut() {
            *a *= inv;
        }
        means.push(acc);
    }

    filter_mean(&means, config)
}

/// Lower-bound estimate of the covariance scale from filtered data.
#[derive(Debug, Clone)]
pub struct SigmaLowerBound<F> {
    pub sigma_hat: F,
    pub delta: F,
    pub report: FilterReport<F>,
}

/// Runs the filter and deflates the retained top covariance eigenvalue into
/// a lower bound on sigma: `sigma_hat = sqrt(lambda) / sqrt(1 + delta^2 / eps)`
/// with `delta = sqrt(eps) + sqrt(d/n) + sqrt(ln(1/tau)/n)`. The deflation
/// constant is frozen at one. With `epsilon = 0` the working level `eps'`
/// stands in for `eps` in the denominator.
pub fn estimate_sigma_lower_bound<F: Real>(
    points: &[Vec<F>],
    config: &FilterConfig<F>,
) -> Result<SigmaLowerBound<F>> {
    let report = filter_mean(points, config)?;
    let dim = points[0].len();
    let n = points.len();
    let delta = stability_delta(config.epsilon, dim, n, config.tau);
    let eps_den = if config.epsilon > F::zero() {
        config.epsilon
    } else {
        report.effective_contamination
    };
    let sigma_hat =
        report.final_top_eigenvalue.sqrt() / (F::one() + delta * delta / eps_den).sqrt();
    Ok(SigmaLowerBound {
        sigma_hat,
        delta,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn config(eps: f64) -> FilterConfig<f64> {
        FilterConfig::new(eps, 0.1).unwrap()
    }

    #[test]
    fn identical_points_return_that_point() {
        let points = vec![vec![3.0_f64, -2.0, 0.5]; 20];
        let report = filter_mean(&points, &config(0.1)).unwrap();
        assert!(report.degenerate_exit);
        assert_eq!(report.estimate, vec![3.0, -2.0, 0.5]);
    }

    #[test]
    fn one_dimensional_cluster_with_far_outliers() {
        // 90 points at 0 and 10 at 100 with eps = 0.1: the filter must land
        // within [0, 1]; an eps-trimmed mean on the same data gives exactly 0.
        let mut points: Vec<Vec<f64>> = vec![vec![0.0]; 90];
        points.extend(vec![vec![100.0]; 10]);
        let report = filter_mean(&points, &config(0.1)).unwrap();
        let est = report.estimate[0];
        let mut sorted: Vec<f64> = points.iter().map(|p| p[0]).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let trimmed: f64 = sorted[10..90].iter().sum::<f64>() / 80.0;
        assert_eq!(trimmed, 0.0);
        assert!((0.0..=1.0).contains(&est), "estimate {est} not in [0, 1]");
        assert!(report.iterations <= points.len());
    }

    #[test]
    fn weights_stay_in_bounds_and_mass_decreases() {
        let mut points: Vec<Vec<f64>> =
            (0..50).map(|i| vec![(i % 7) as f64, -(i as f64)]).collect();
        points.push(vec![500.0, 500.0]);
        points.push(vec![-500.0, 300.0]);
        let report = filter_mean(&points, &config(0.05)).unwrap();
        let n = points.len() as f64;
        for w in report.weights.weights() {
            assert!(*w >= 0.0 && *w <= 1.0 / n + 1e-15);
        }
        let mut prev = 1.0;
        for row in &report.trace {
            assert!(row.mass <= prev + 1e-12);
            assert!(row.removed_mass >= -1e-12);
            prev = row.mass;
        }
        assert_relative_eq!(
            report.weights.mass(),
            report.weights.weights().iter().sum::<f64>(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn tiny_inputs_are_rejected() {
        assert!(filter_mean::<f64>(&[], &config(0.1)).is_err());
        assert!(filter_mean(&[vec![1.0_f64]], &config(0.1)).is_err());
    }

    #[test]
    fn non_finite_points_are_rejected() {
        let points = vec![vec![0.0_f64], vec![f64::NAN]];
        assert!(filter_mean(&points, &config(0.1)).is_err());
        let points = vec![vec![0.0_f64], vec![f64::INFINITY]];
        assert!(filter_mean(&points, &config(0.1)).is_err());
    }

    #[test]
    fn breakdown_epsilon_is_rejected() {
        let points = vec![vec![0.0_f64], vec![1.0]];
        let err = filter_mean(&points, &config(0.3));
        assert!(matches!(err, Err(crate::Error::BreakdownExceeded(_))));
    }

    #[test]
    fn effective_contamination_rule_and_cap() {
        let cfg = config(0.1);
        // 2*0.1 + 2*ln(10)/2000 exceeds the 1/6 cap.
        assert_relative_eq!(cfg.effective_contamination(2000).unwrap(), 1.0 / 6.0);
        let cfg = config(0.01);
        let expected = 0.02 + 2.0 * 10.0_f64.ln() / 10_000.0;
        assert_relative_eq!(cfg.effective_contamination(10_000).unwrap(), expected);
    }

    #[test]
    fn bucket_rule_example() {
        // eps' = 0.02 on 1000 points: 20 buckets of 50, no remainder.
        let mut cfg = config(0.0);
        cfg.effective_override = Some(0.02);
        let points: Vec<Vec<f64>> = (0..1000).map(|i| vec![i as f64 * 1e-3]).collect();
        let report = bucketed_filter_mean(&points, &cfg, 3).unwrap();
        assert_eq!(report.weights.weights().len(), 20);
    }

    #[test]
    fn bucketed_identical_points_return_that_point() {
        let points = vec![vec![7.0_f64, -1.0]; 600];
        let report = bucketed_filter_mean(&points, &config(0.05), 1).unwrap();
        assert_eq!(report.estimate, vec![7.0, -1.0]);
    }

    #[test]
    fn bucket_rule_needs_enough_points() {
        let points = vec![vec![0.0_f64]; 20];
        // eps' around 0.23 capped to 1/6 gives k = 3 for n = 20; shrink n to
        // force k < 2.
        let small = vec![vec![0.0_f64]; 5];
        assert!(bucketed_filter_mean(&small, &config(0.01), 1).is_err());
        assert!(bucketed_filter_mean(&points, &config(0.2), 1).is_ok());
    }

    #[test]
    fn sigma_lower_bound_is_zero_for_identical_points() {
        let points = vec![vec![2.0_f64, 2.0]; 50];
        let est = estimate_sigma_lower_bound(&points, &config(0.05)).unwrap();
        assert_eq!(est.sigma_hat, 0.0);
    }

    #[test]
    fn sigma_lower_bound_is_homogeneous() {
        let points: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.1;
                vec![t.sin(), t.cos(), (2.0 * t).sin()]
            })
            .collect();
        let scaled: Vec<Vec<f64>> = points
            .iter()
            .map(|p| p.iter().map(|x| 3.0 * x).collect())
            .collect();
        let a = estimate_sigma_lower_bound(&points, &config(0.05)).unwrap();
        let b = estimate_sigma_lower_bound(&scaled, &config(0.05)).unwrap();
        assert_relative_eq!(b.sigma_hat, 3.0 * a.sigma_hat, max_relative = 1e-12);
    }
}
