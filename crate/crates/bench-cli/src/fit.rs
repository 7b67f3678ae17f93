//! Log-log scaling fits over experiment records.

use std::collections::BTreeMap;

use crate::runner::TrialRecord;
use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingAxis {
    Epsilon,
    N,
}

impl ScalingAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "epsilon" => Ok(ScalingAxis::Epsilon),
            "n" => Ok(ScalingAxis::N),
            other => Err(BenchError::InvalidConfig(format!(
                "axis must be 'epsilon' or 'n', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// `(axis value, mean excess risk)` per grid cell, ascending.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares fit of `log(mean excess risk)` against `log(axis value)`.
///
/// Requires at least three distinct axis values, positive mean excess in
/// every group, and all non-axis grid parameters constant.
pub fn fit_scaling(records: &[TrialRecord], axis: ScalingAxis) -> Result<ScalingFit> {
    if records.is_empty() {
        return Err(BenchError::InvalidConfig("no records to fit".into()));
    }
    let mut groups: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    let mut complements: Vec<(usize, Option<u64>, Option<u64>, u64)> = Vec::new();
    for r in records {
        let value = match axis {
            ScalingAxis::Epsilon => r.epsilon,
            ScalingAxis::N => r.n as f64,
        };
        groups
            .entry(value.to_bits())
            .or_insert_with(|| (value, Vec::new()))
            .1
            .push(r.excess_risk);
        let complement = match axis {
            ScalingAxis::Epsilon => (r.dim, Some(r.n as u64), None, r.sigma.to_bits()),
            ScalingAxis::N => (r.dim, None, Some(r.epsilon.to_bits()), r.sigma.to_bits()),
        };
        if !complements.contains(&complement) {
            complements.push(complement);
        }
    }
    if complements.len() > 1 {
        return Err(BenchError::InvalidConfig(
            "non-axis grid parameters must be constant for a scaling fit".into(),
        ));
    }
    if groups.len() < 3 {
        return Err(BenchError::InvalidConfig(format!(
            "need at least 3 distinct axis values, got {}",
            groups.len()
        )));
    }

    let mut points: Vec<(f64, f64)> = groups
        .values()
        .map(|(v, xs)| (*v, xs.iter().sum::<f64>() / xs.len() as f64))
        .collect();
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if points.iter().any(|(v, m)| !(*v > 0.0) || !(*m > 0.0)) {
        return Err(BenchError::InvalidConfig(
            "scaling fit needs positive axis values and positive mean excess risk".into(),
        ));
    }

    let logs: Vec<(f64, f64)> = points.iter().map(|(v, m)| (v.ln(), m.ln())).collect();
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / k;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    if sxx == 0.0 {
        return Err(BenchError::InvalidConfig(
            "degenerate axis: no spread".into(),
        ));
    }
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let ss_tot: f64 = logs.iter().map(|(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|(x, y)| {
            let p = intercept + exponent * x;
            (y - p) * (y - p)
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };

    Ok(ScalingFit {
        exponent,
        prefactor: intercept.exp(),
        r_squared,
        points,
    })
}
