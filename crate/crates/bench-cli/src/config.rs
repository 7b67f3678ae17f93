//! Experiment configuration: TOML schema and per-cell construction.

use serde::Deserialize;

use robust_sco::contamination::AdversarySpec;
use robust_sco::problems::{FunctionDistribution, SpikeVariant};

use crate::{BenchError, Result};

/// Top-level experiment description. See the repository README for the full
/// schema and worked examples under `configs/`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base_seed: u64,
    /// Trials per grid cell.
    pub trials: usize,
    pub distribution: DistributionConfig,
    pub adversary: AdversaryConfig,
    pub algorithm: AlgorithmConfig,
    pub grid: GridConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    /// One of: linear, quadratic, scaled_quadratic, norm, spike_1d, product.
    pub family: String,
    /// spike_1d: "centered" or "biased".
    #[serde(default)]
    pub variant: Option<String>,
    /// spike_1d: fixed spike probability. Mutually exclusive with mass_rule.
    #[serde(default)]
    pub mass: Option<f64>,
    /// spike_1d: "epsilon" ties the spike probability to the cell's epsilon,
    /// "d_over_n" to d/n.
    #[serde(default)]
    pub mass_rule: Option<String>,
    /// spike_1d: the feasible set is the ball of this radius (default 1).
    #[serde(default)]
    pub radius: Option<f64>,
    /// Other families: feasible-set diameter (default 1).
    #[serde(default)]
    pub diameter: Option<f64>,
    /// Other families: feasible-set shape, "ball" (default) or "box" (a
    /// centered hypercube whose diagonal equals the diameter). The hard
    /// instances (spike_1d, product) fix their own domains.
    #[serde(default)]
    pub domain: Option<String>,
    /// linear: population mean is mean_norm * e1 (default 1).
    #[serde(default)]
    pub mean_norm: Option<f64>,
    /// quadratic: target is target_offset * e1 (default 0).
    #[serde(default)]
    pub target_offset: Option<f64>,
    /// quadratic: population curvature (default 1).
    #[serde(default)]
    pub curvature: Option<f64>,
    /// scaled_quadratic: mean of the random scale (default -1).
    #[serde(default)]
    pub scale_mean: Option<f64>,
    /// product: bias magnitude p with per-coordinate bias p/sqrt(d).
    #[serde(default)]
    pub bias: Option<f64>,
    /// norm: the kink sits at center_offset * e1 (default 0).
    #[serde(default)]
    pub center_offset: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    /// One of: none, mean_shift, tv_swap, worst_direction, huber_mixture.
    pub kind: String,
    /// mean_shift / worst_direction: shift length.
    #[serde(default)]
    pub magnitude: Option<f64>,
    /// huber_mixture: the replacement distribution.
    #[serde(default)]
    pub target: Option<Box<DistributionConfig>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    /// One of: robust_net_pgd, robust_pgd, smooth_and_optimize,
    /// naive_mean_pgd.
    pub name: String,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Iteration override; the rate-optimal default applies when absent.
    #[serde(default)]
    pub iterations: Option<usize>,
    /// "known" feeds the family's declared sigma to the solver; "estimated"
    /// runs the filtering lower-bound estimator on the corrupted gradients
    /// at the domain center first.
    #[serde(default = "default_sigma_mode")]
    pub sigma_mode: String,
    /// smooth_and_optimize: smoothing radius override.
    #[serde(default)]
    pub smoothing_radius: Option<f64>,
}

fn default_tau() -> f64 {
    0.1
}

fn default_sigma_mode() -> String {
    "known".to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dims: Vec<usize>,
    pub ns: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub sigmas: Vec<f64>,
}

/// One grid cell, in row-major order over (dims, ns, epsilons, sigmas).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub dim: usize,
    pub n: usize,
    pub epsilon: f64,
    pub sigma: f64,
}

impl GridConfig {
    pub fn cells(&self) -> Vec<GridCell> {
        let mut out = Vec::new();
        for &dim in &self.dims {
            for &n in &self.ns {
                for &epsilon in &self.epsilons {
                    for &sigma in &self.sigmas {
                        out.push(GridCell {
                            dim,
                            n,
                            epsilon,
                            sigma,
                        });
                    }
                }
            }
        }
        out
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects bad configs before any trial runs: every cell must yield a
    /// constructible distribution, a constructible adversary, and an
    /// algorithm the family supports.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(BenchError::InvalidConfig(
                "trials must be at least one".into(),
            ));
        }
        let cells = self.grid.cells();
        if cells.is_empty() {
            return Err(BenchError::InvalidConfig("grid has no cells".into()));
        }
        for cell in &cells {
            let dist = build_distribution(&self.distribution, cell)?;
            build_adversary(&self.adversary, cell)?;
            check_pairing(&self.algorithm, &dist)?;
            if !(self.algorithm.tau > 0.0 && self.algorithm.tau < 1.0) {
                return Err(BenchError::InvalidConfig("tau must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }
}

/// Family/algorithm pairing rules, applied before any trial runs.
fn check_pairing(alg: &AlgorithmConfig, dist: &FunctionDistribution<f64>) -> Result<()> {
    let constants = dist.constants();
    match alg.name.as_str() {
        "robust_net_pgd" => {
            if constants.smoothness.is_none() {
                return Err(BenchError::Core(robust_sco::Error::InvalidArgument(
                    "robust_net_pgd needs a family with finite population smoothness".into(),
                )));
            }
            if constants.smoothness == Some(0.0) && constants.lipschitz.is_none() {
                return Err(BenchError::Core(robust_sco::Error::InvalidArgument(
                    "linear families need a Lipschitz constant for the step schedule".into(),
                )));
            }
        }
        "robust_pgd" | "naive_mean_pgd" => {
            let smooth_ok = matches!(constants.smoothness, Some(b) if b > 0.0);
            if !smooth_ok && constants.lipschitz.is_none() {
                return Err(BenchError::Core(robust_sco::Error::InvalidArgument(
                    "need positive smoothness or a Lipschitz constant".into(),
                )));
            }
        }
        "smooth_and_optimize" => {
            if !matches!(constants.lipschitz, Some(l) if l > 0.0) {
                return Err(BenchError::Core(robust_sco::Error::InvalidArgument(
                    "smooth_and_optimize needs a positive Lipschitz constant".into(),
                )));
            }
        }
        other => {
            return Err(BenchError::InvalidConfig(format!(
                "unknown algorithm '{other}'"
            )));
        }
    }
    match alg.sigma_mode.as_str() {
        "known" | "estimated" => Ok(()),
        other => Err(BenchError::InvalidConfig(format!(
            "unknown sigma_mode '{other}'"
        ))),
    }
}

/// Feasible set of the configurable families: a centered ball of the given
/// diameter, or a centered hypercube whose Euclidean diagonal equals it.
fn build_domain(
    kind: Option<&str>,
    dim: usize,
    diameter: f64,
) -> Result<robust_sco::domain::FeasibleDomain<f64>> {
    use robust_sco::domain::FeasibleDomain;
    match kind.unwrap_or("ball") {
        "ball" => Ok(FeasibleDomain::centered_ball(dim, diameter / 2.0)?),
        "box" => {
            let half = diameter / (2.0 * (dim as f64).sqrt());
            Ok(FeasibleDomain::axis_box(vec![0.0; dim], vec![half; dim])?)
        }
        other => Err(BenchError::InvalidConfig(format!(
            "unknown domain kind '{other}' (ball | box)"
        ))),
    }
}

pub fn build_distribution(
    cfg: &DistributionConfig,
    cell: &GridCell,
) -> Result<FunctionDistribution<f64>> {
    let d = cell.dim;
    let diameter = cfg.diameter.unwrap_or(1.0);
    let domain_kind = cfg.domain.as_deref();
    if domain_kind.is_some() && matches!(cfg.family.as_str(), "spike_1d" | "product") {
        return Err(BenchError::InvalidConfig(
            "spike_1d and product fix their own domains; drop the domain key".into(),
        ));
    }
    let dist = match cfg.family.as_str() {
        "linear" => {
            let mut mean = vec![0.0; d];
            mean[0] = cfg.mean_norm.unwrap_or(1.0);
            let domain = build_domain(domain_kind, d, diameter)?;
            FunctionDistribution::linear_loss(mean, cell.sigma, domain)?
        }
        "quadratic" => {
            let mut target = vec![0.0; d];
            target[0] = cfg.target_offset.unwrap_or(0.0);
            let domain = build_domain(domain_kind, d, diameter)?;
            FunctionDistribution::quadratic(
                target,
                cfg.curvature.unwrap_or(1.0),
                cell.sigma,
                domain,
            )?
        }
        "scaled_quadratic" => {
            let domain = build_domain(domain_kind, d, diameter)?;
            // Declared covariance bound is scale_noise * radius; invert so
            // the cell's sigma is the declared bound.
            let noise = cell.sigma / (diameter / 2.0);
            FunctionDistribution::scaled_quadratic(cfg.scale_mean.unwrap_or(-1.0), noise, domain)?
        }
        "norm" => {
            let mut center = vec![0.0; d];
            center[0] = cfg.center_offset.unwrap_or(0.0);
            let domain = build_domain(domain_kind, d, diameter)?;
            FunctionDistribution::norm_loss(center, domain)?
        }
        "spike_1d" => {
            let variant = match cfg.variant.as_deref() {
                Some("centered") => SpikeVariant::Centered,
                Some("biased") => SpikeVariant::Biased,
                other => {
                    return Err(BenchError::InvalidConfig(format!(
                        "spike_1d needs variant 'centered' or 'biased', got {other:?}"
                    )))
                }
            };
            let mass = match (cfg.mass, cfg.mass_rule.as_deref()) {
                (Some(m), None) => m,
                (None, Some("epsilon")) => cell.epsilon,
                (None, Some("d_over_n")) => cell.dim as f64 / cell.n as f64,
                (None, Some(other)) => {
                    return Err(BenchError::InvalidConfig(format!(
                        "unknown mass_rule '{other}'"
                    )))
                }
                (Some(_), Some(_)) => {
                    return Err(BenchError::InvalidConfig(
                        "set either mass or mass_rule, not both".into(),
                    ))
                }
                (None, None) => {
                    return Err(BenchError::InvalidConfig(
                        "spike_1d needs mass or mass_rule".into(),
                    ))
                }
            };
            FunctionDistribution::spike_embedded(
                cell.sigma,
                mass,
                cfg.radius.unwrap_or(1.0),
                variant,
                d,
            )?
        }
        "product" => {
            let signs = vec![1.0; d];
            FunctionDistribution::product_instance(
                signs,
                cfg.bias.unwrap_or(0.5),
                cell.sigma,
                diameter,
            )?
        }
        other => {
            return Err(BenchError::InvalidConfig(format!(
                "unknown family '{other}'"
            )));
        }
    };
    Ok(dist)
}

pub fn build_adversary(cfg: &AdversaryConfig, cell: &GridCell) -> Result<AdversarySpec<f64>> {
    match cfg.kind.as_str() {
        "none" => Ok(AdversarySpec::None),
        "mean_shift" => {
            let magnitude = cfg
                .magnitude
                .ok_or_else(|| BenchError::InvalidConfig("mean_shift needs a magnitude".into()))?;
            Ok(AdversarySpec::MeanShift {
                magnitude,
                direction: None,
            })
        }
        "worst_direction" => {
            let magnitude = cfg.magnitude.ok_or_else(|| {
                BenchError::InvalidConfig("worst_direction needs a magnitude".into())
            })?;
            Ok(AdversarySpec::WorstDirection { magnitude })
        }
        "tv_swap" => Ok(AdversarySpec::TvSwap),
        "huber_mixture" => {
            let target = cfg.target.as_ref().ok_or_else(|| {
                BenchError::InvalidConfig("huber_mixture needs a target distribution".into())
            })?;
            Ok(AdversarySpec::HuberMixture {
                target: build_distribution(target, cell)?,
            })
        }
        other => Err(BenchError::InvalidConfig(format!(
            "unknown adversary '{other}'"
        ))),
    }
}
