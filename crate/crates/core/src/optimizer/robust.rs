//! Robust projected-gradient solvers.

use std::collections::HashMap;

use super::net::{nearest_net_point, net_coordinates, NetConfig};
use super::pgd::{pgd_biased, PgdConfig, PgdRun, StepSchedule};
use super::smoothing::smoothing_plan;
use crate::domain::FeasibleDomain;
use crate::estimators::{filter_mean, FilterConfig};
use crate::linalg::{add_scaled, scale_in_place};
use crate::problems::{RiskConstants, SampleFunction};
use crate::rng::{derive_seed, STREAM_POWER, STREAM_SMOOTHING};
use crate::{real, Error, Real, Result};

/// Shared controls for the robust solvers.
#[derive(Debug, Clone)]
pub struct RobustSolverConfig<F> {
    pub epsilon: F,
    pub tau: F,
    /// Iteration count override; the default follows the rate-optimal choice
    /// for the active schedule.
    pub iterations: Option<usize>,
    /// Start point; domain center when absent.
    pub start: Option<Vec<F>>,
    pub seed: u64,
    /// The net is skipped when its fineness falls to this fraction of the
    /// diameter (the net only matters when gradients must be reused across
    /// nearby iterates; at fineness zero it is vacuous).
    pub net_floor_factor: F,
    /// Cap on the derived default iteration count.
    pub iteration_cap: usize,
    /// Default iteration count when the rate denominator vanishes
    /// (noise-free data).
    pub fallback_iterations: usize,
    /// Scale of the theoretical bias bound fed to the Lipschitz schedule:
    /// `B = bias_constant * sigma * (sqrt(eps) + sqrt(d ln(1/tau) / n))`.
    pub bias_constant: F,
}

impl<F: Real> RobustSolverConfig<F> {
    pub fn new(epsilon: F, tau: F, seed: u64) -> Result<Self> {
        if !(epsilon >= F::zero()) {
            return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
        }
        if !(tau > F::zero() && tau < F::one()) {
            return Err(Error::InvalidArgument("tau must lie in (0, 1)".into()));
        }
        Ok(RobustSolverConfig {
            epsilon,
            tau,
            iterations: None,
            start: None,
            seed,
            net_floor_factor: real(1e-9),
            iteration_cap: 10_000,
            fallback_iterations: 100,
            bias_constant: real(4.0),
        })
    }

    fn filter_config(&self) -> Result<FilterConfig<F>> {
        let mut cfg = FilterConfig::new(self.epsilon, self.tau)?;
        cfg.power.seed = derive_seed(self.seed, STREAM_POWER);
        Ok(cfg)
    }
}

/// Aggregate diagnostics of the gradient-estimation side of a run.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorStats<F> {
    /// Distinct filtering runs (memoized net hits are not recounted).
    pub calls: usize,
    pub filter_iterations: usize,
    pub min_final_mass: F,
    pub degenerate_exits: usize,
}

#[derive(Debug, Clone)]
pub struct RobustRun<F> {
    pub pgd: PgdRun<F>,
    pub iterations: usize,
    pub sigma_used: F,
    /// Fineness of the net actually used; `None` when gradients were
    /// evaluated at the iterates themselves.
    pub net_fineness: Option<F>,
    pub smoothing_radius: Option<F>,
    pub estimator: EstimatorStats<F>,
}

impl<F: Real> RobustRun<F> {
    pub fn solution(&self) -> &[F] {
        &self.pgd.average
    }
}

/// `sqrt(eps) + sqrt(d ln(1/tau) / n)`: the width the optimal rate is built
/// from.
fn rate_width<F: Real>(epsilon: F, dim: usize, n: usize, tau: F) -> F {
    let nf = real::<F>(n as f64);
    epsilon.max(F::zero()).sqrt() + (real::<F>(dim as f64) * (F::one() / tau).ln() / nf).sqrt()
}

fn default_iterations<F: Real>(
    schedule: &StepSchedule<F>,
    diameter: F,
    denom: F,
    cfg: &RobustSolverConfig<F>,
) -> usize {
    if !(denom > F::zero()) {
        return cfg.fallback_iterations.max(1);
    }
    let raw = match schedule {
        StepSchedule::ConstantSmooth { smoothness } => (*smoothness * diameter / denom).ceil(),
        StepSchedule::ConstantLipschitz { lipschitz, .. } => {
            let r = *lipschitz / denom;
            (r * r).ceil()
        }
    };
    let raw = raw.to_f64().unwrap_or(1.0);
    (raw.max(1.0) as usize).clamp(1, cfg.iteration_cap)
}

fn validate_samples<F: Real>(
    samples: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "sample list must be nonempty".into(),
        ));
    }
    if samples.iter().any(|f| f.dim() != domain.dim()) {
        return Err(Error::InvalidArgument(
            "sample dimensions must match the domain".into(),
        ));
    }
    Ok(())
}

/// Net-based projected gradient descent with the filtering gradient
/// estimator.
///
/// Gradients are estimated at the nearest point of an implicit coordinate
/// grid of fineness `sigma * sqrt(eps) / smoothness` and memoized per net
/// point, so revisits reuse the estimate. A linear population risk
/// (smoothness zero) collapses the net to a single point, and the step
/// schedule falls back to the Lipschitz one.
pub fn robust_net_pgd<F: Real>(
    samples: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
    constants: &RiskConstants<F>,
    cfg: &RobustSolverConfig<F>,
) -> Result<RobustRun<F>> {
    validate_samples(samples, domain)?;
    let beta = constants.smoothness.ok_or_else(|| {
        Error::InvalidArgument(
            "net-based solver needs finite population smoothness; use smooth_and_optimize for nonsmooth risks".into(),
        )
    })?;
    if beta < F::zero() || !beta.is_finite() {
        return Err(Error::InvalidArgument(
            "smoothness must be finite and nonnegative".into(),
        ));
    }
    let sigma = constants.sigma;
    if sigma < F::zero() {
        return Err(Error::InvalidArgument("sigma must be nonnegative".into()));
    }
    let d = domain.dim();
    let n = samples.len();
    let denom = sigma * rate_width(cfg.epsilon, d, n, cfg.tau);

    let (schedule, net) = if beta > F::zero() {
        let fineness = sigma * cfg.epsilon.max(F::zero()).sqrt() / beta;
        let net = if fineness > cfg.net_floor_factor * domain.diameter() {
            Some(NetConfig { fineness, dim: d })
        } else {
            None
        };
        (StepSchedule::ConstantSmooth { smoothness: beta }, net)
    } else {
        // Constant gradient field: any single evaluation point represents
        // the whole domain exactly.
        let lipschitz = constants.lipschitz.ok_or_else(|| {
            Error::InvalidArgument(
                "zero smoothness needs a Lipschitz constant for the step schedule".into(),
            )
        })?;
        let schedule = StepSchedule::ConstantLipschitz {
            lipschitz,
            bias_bound: cfg.bias_constant * denom,
        };
        (
            schedule,
            Some(NetConfig {
                fineness: F::infinity(),
                dim: d,
            }),
        )
    };

    let t = cfg
        .iterations
        .unwrap_or_else(|| default_iterations(&schedule, domain.diameter(), denom, cfg));
    run_filtered(samples, domain, schedule, t, net, cfg, sigma, None)
}

/// Projected gradient descent filtering at the iterate itself (no net).
/// The step schedule follows whichever of smoothness / Lipschitz constant is
/// available.
pub fn robust_pgd<F: Real>(
    samples: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
    constants: &RiskConstants<F>,
    cfg: &RobustSolverConfig<F>,
) -> Result<RobustRun<F>> {
    validate_samples(samples, domain)?;
    let sigma = constants.sigma;
    let denom = sigma * rate_width(cfg.epsilon, domain.dim(), samples.len(), cfg.tau);
    let schedule = pick_schedule(constants, denom, cfg)?;
    let t = cfg
        .iterations
        .unwrap_or_else(|| default_iterations(&schedule, domain.diameter(), denom, cfg));
    run_filtered(samples, domain, schedule, t, None, cfg, sigma, None)
}

/// Convolutional-smoothing wrapper for nonsmooth population risks: perturbs
/// each sample by an independent uniform ball draw and runs the net-based
/// solver with the effective constants.
pub fn smooth_and_optimize<F: Real>(
    samples: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
    constants: &RiskConstants<F>,
    cfg: &RobustSolverConfig<F>,
    radius: Option<F>,
) -> Result<RobustRun<F>> {
    validate_samples(samples, domain)?;
    let lipschitz = constants
        .lipschitz
        .filter(|l| *l > F::zero())
        .ok_or_else(|| {
            Error::InvalidArgument("smoothing needs a positive Lipschitz constant".into())
        })?;
    let sigma = constants.sigma;
    let d = domain.dim();
    let n = samples.len();
    let s = radius.unwrap_or_else(|| {
        domain.diameter() * (sigma / lipschitz + F::one()) * rate_width(cfg.epsilon, d, n, cfg.tau)
    });
    if !(s > F::zero()) {
        return Err(Error::InvalidArgument(
            "smoothing radius must be positive".into(),
        ));
    }
    let plan = smoothing_plan(
        d,
        n,
        s,
        lipschitz,
        sigma,
        derive_seed(cfg.seed, STREAM_SMOOTHING),
    )?;
    let shifted: Vec<SampleFunction<F>> = samples
        .iter()
        .zip(plan.perturbations.iter())
        .map(|(f, u)| f.clone().shifted(u.clone()))
        .collect();
    let effective = RiskConstants {
        sigma: plan.effective_sigma,
        smoothness: Some(plan.effective_smoothness),
        lipschitz: Some(lipschitz),
        noncentral: constants.noncentral,
    };
    let mut run = robust_net_pgd(&shifted, domain, &effective, cfg)?;
    run.smoothing_radius = Some(s);
    Ok(run)
}

/// Non-robust baseline: plain sample-mean gradients through the same PGD
/// core and schedules.
pub fn naive_mean_pgd<F: Real>(
    samples: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
    constants: &RiskConstants<F>,
    cfg: &RobustSolverConfig<F>,
) -> Result<RobustRun<F>> {
    validate_samples(samples, domain)?;
    let sigma = constants.sigma;
    let denom = sigma * rate_width(cfg.epsilon, domain.dim(), samples.len(), cfg.tau);
    let schedule = pick_schedule(constants, denom, cfg)?;
    let t = cfg
        .iterations
        .unwrap_or_else(|| default_iterations(&schedule, domain.diameter(), denom, cfg));
    let w0 = cfg
        .start
        .clone()
        .unwrap_or_else(|| domain.center().to_vec());
    let inv_n = F::one() / F::from_usize(samples.len()).unwrap();
    let mut calls = 0usize;
    let oracle = |w: &[F]| -> Result<Vec<F>> {
        calls += 1;
        let mut g = vec![F::zero(); w.len()];
        for f in samples {
            add_scaled(&mut g, &f.gradient(w), F::one());
        }
        scale_in_place(&mut g, inv_n);
        Ok(g)
    };
    let pgd = pgd_biased(
        oracle,
        domain,
        &PgdConfig {
            schedule,
            iterations: t,
        },
        &w0,
    )?;
    Ok(RobustRun {
        pgd,
        iterations: t,
        sigma_used: sigma,
        net_fineness: None,
        smoothing_radius: None,
        estimator: EstimatorStats {
            calls,
            filter_iterations: 0,
            min_final_mass: F::one(),
            degenerate_exits: 0,
        },
    })
}

fn pick_schedule<F: Real>(
    constants: &RiskConstants<F>,
    denom: F,
    cfg: &RobustSolverConfig<F>,
) -> Result<StepSchedule<F>> {
    match constants.smoothness {
        Some(beta) if beta > F::zero() => Ok(StepSchedule::ConstantSmooth { smoothness: beta }),
        _ => {
            let lipschitz = constants.lipschitz.ok_or_else(|| {
                Error::InvalidArgument("need a positive smoothness or a Lipschitz constant".into())
            })?;
            Ok(StepSchedule::ConstantLipschitz {
                lipschitz,
                bias_bound: cfg.bias_constant * denom,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_filtered<F: Real>(
    samples: &[SampleFunction<F>],
    domain: &FeasibleDomain<F>,
    schedule: StepSchedule<F>,
    iterations: usize,
    net: Option<NetConfig<F>>,
    cfg: &RobustSolverConfig<F>,
    sigma_used: F,
    smoothing_radius: Option<F>,
) -> Result<RobustRun<F>> {
    let filter_cfg = cfg.filter_config()?;
    let w0 = cfg
        .start
        .clone()
        .unwrap_or_else(|| domain.center().to_vec());
    let mut memo: HashMap<Vec<i64>, Vec<F>> = HashMap::new();
    let mut stats = EstimatorStats {
        calls: 0,
        filter_iterations: 0,
        min_final_mass: F::one(),
        degenerate_exits: 0,
    };

    let oracle = |w: &[F]| -> Result<Vec<F>> {
        let (key, point) = match &net {
            Some(nc) => (Some(net_coordinates(nc, w)?), nearest_net_point(nc, w)?),
            None => (None, w.to_vec()),
        };
        if let Some(k) = &key {
            if let Some(g) = memo.get(k) {
                return Ok(g.clone());
            }
        }
        let grads: Vec<Vec<F>> = samples.iter().map(|f| f.gradient(&point)).collect();
        let report = filter_mean(&grads, &filter_cfg)?;
        stats.calls += 1;
        stats.filter_iterations += report.iterations;
        stats.min_final_mass = stats.min_final_mass.min(report.weights.mass());
        if report.degenerate_exit {
            stats.degenerate_exits += 1;
        }
        if let Some(k) = key {
            memo.insert(k, report.estimate.clone());
        }
        Ok(report.estimate)
    };

    let pgd = pgd_biased(
        oracle,
        domain,
        &PgdConfig {
            schedule,
            iterations,
        },
        &w0,
    )?;
    Ok(RobustRun {
        pgd,
        iterations,
        sigma_used,
        net_fineness: net.map(|n| n.fineness),
        smoothing_radius,
        estimator: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::FunctionDistribution;

    fn solver_config(eps: f64, seed: u64) -> RobustSolverConfig<f64> {
        RobustSolverConfig::new(eps, 0.1, seed).unwrap()
    }

    #[test]
    fn zero_variance_quadratic_matches_plain_pgd_bitwise() {
        // Four identical samples with dyadic parameters: the filter's
        // degenerate path returns the exact common gradient, so the robust
        // trace equals the exact-oracle trace bit for bit.
        let domain = FeasibleDomain::centered_ball(2, 1.0).unwrap();
        let dist =
            FunctionDistribution::quadratic(vec![0.25, -0.5], 1.0, 0.0, domain.clone()).unwrap();
        let samples = dist.sample_functions(4, 1).unwrap();
        let constants = dist.constants();
        let mut cfg = solver_config(0.05, 3);
        cfg.iterations = Some(7);
        cfg.start = Some(vec![1.0, 0.0]);
        let robust = robust_pgd(&samples, &domain, &constants, &cfg).unwrap();

        let plain = pgd_biased(
            |w: &[f64]| dist.population_gradient(w),
            &domain,
            &PgdConfig {
                schedule: StepSchedule::ConstantSmooth { smoothness: 1.0 },
                iterations: 7,
            },
            &[1.0, 0.0],
        )
        .unwrap();
        assert_eq!(robust.pgd.average, plain.average);
        for (a, b) in robust.pgd.trace.iter().zip(plain.trace.iter()) {
            assert_eq!(a.iterate, b.iterate);
        }
    }

    #[test]
    fn point_mass_net_run_obeys_the_net_bias_bound() {
        // Zero-noise quadratic, but sigma declared positive so the net is
        // real: the only bias is the net offset, at most smoothness * fineness.
        let domain = FeasibleDomain::centered_ball(3, 0.5).unwrap();
        let dist = FunctionDistribution::quadratic(vec![0.1, 0.0, -0.2], 1.0, 0.0, domain.clone())
            .unwrap();
        let samples = dist.sample_functions(50, 2).unwrap();
        let mut constants = dist.constants();
        constants.sigma = 0.5;
        let mut cfg = solver_config(0.04, 9);
        cfg.iterations = Some(50);
        let run = robust_net_pgd(&samples, &domain, &constants, &cfg).unwrap();
        let fineness = run.net_fineness.unwrap();
        assert!((fineness - 0.5 * 0.04_f64.sqrt()).abs() < 1e-12);
        let excess =
            dist.population_risk(run.solution()).unwrap() - dist.population_min_risk().unwrap();
        let bound = 1.0 * 1.0 / (2.0 * 50.0) + 1.0 * fineness * 1.0;
        assert!(excess <= bound + 1e-9, "excess {excess} > bound {bound}");
    }

    #[test]
    fn memoization_reuses_net_estimates() {
        let domain = FeasibleDomain::centered_ball(2, 1.0).unwrap();
        let dist = FunctionDistribution::linear_loss(vec![0.3, 0.0], 0.1, domain.clone()).unwrap();
        let samples = dist.sample_functions(200, 5).unwrap();
        let constants = dist.constants();
        let mut cfg = solver_config(0.05, 1);
        cfg.iterations = Some(40);
        let run = robust_net_pgd(&samples, &domain, &constants, &cfg).unwrap();
        // Linear family: single net point, so exactly one filtering run.
        assert_eq!(run.estimator.calls, 1);
        assert_eq!(run.iterations, 40);
    }

    #[test]
    fn identical_inputs_give_bitwise_identical_solutions() {
        let domain = FeasibleDomain::centered_ball(4, 1.0).unwrap();
        let dist =
            FunctionDistribution::quadratic(vec![0.2, 0.1, 0.0, -0.3], 2.0, 1.0, domain.clone())
                .unwrap();
        let samples = dist.sample_functions(300, 8).unwrap();
        let constants = dist.constants();
        let cfg = solver_config(0.05, 13);
        let a = robust_net_pgd(&samples, &domain, &constants, &cfg).unwrap();
        let b = robust_net_pgd(&samples, &domain, &constants, &cfg).unwrap();
        let bits_a: Vec<u64> = a.solution().iter().map(|x| x.to_bits()).collect();
        let bits_b: Vec<u64> = b.solution().iter().map(|x| x.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
    }

    #[test]
    fn nonsmooth_family_is_rejected_by_the_net_solver() {
        let domain = FeasibleDomain::centered_ball(2, 1.0).unwrap();
        let dist = FunctionDistribution::norm_loss(vec![0.0, 0.0], domain.clone()).unwrap();
        let samples = dist.sample_functions(10, 1).unwrap();
        let constants = dist.constants();
        let cfg = solver_config(0.05, 1);
        assert!(robust_net_pgd(&samples, &domain, &constants, &cfg).is_err());
        // The smoothing wrapper handles it.
        assert!(smooth_and_optimize(&samples, &domain, &constants, &cfg, Some(0.1)).is_ok());
    }

    #[test]
    fn nonpositive_smoothing_radius_is_rejected() {
        let domain = FeasibleDomain::centered_ball(2, 1.0).unwrap();
        let dist = FunctionDistribution::norm_loss(vec![0.0, 0.0], domain.clone()).unwrap();
        let samples = dist.sample_functions(10, 1).unwrap();
        let constants = dist.constants();
        let cfg = solver_config(0.05, 1);
        assert!(smooth_and_optimize(&samples, &domain, &constants, &cfg, Some(0.0)).is_err());
    }
}
