//! Trial execution and CSV input/output.

use std::io::{BufRead, Write};
use std::sync::Once;
use std::time::Instant;

use rayon::prelude::*;

use robust_sco::contamination::corrupt;
use robust_sco::estimators::{estimate_sigma_lower_bound, FilterConfig};
use robust_sco::optimizer::{
    naive_mean_pgd, robust_net_pgd, robust_pgd, smooth_and_optimize, RobustRun, RobustSolverConfig,
};
use robust_sco::rng::{derive_seed, trial_seed, STREAM_ADVERSARY, STREAM_SAMPLES};

use crate::config::{build_adversary, build_distribution, ExperimentConfig, GridCell};
use crate::{BenchError, Result};

/// Environment variable selecting the worker-thread count; trials are
/// deterministic per seed, so parallelism never changes the records.
pub const THREADS_ENV: &str = "ROBUST_SCO_THREADS";

static POOL_INIT: Once = Once::new();

fn init_thread_pool() {
    POOL_INIT.call_once(|| {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            if let Ok(threads) = v.parse::<usize>() {
                if threads >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build_global();
                }
            }
        }
    });
}

/// One experiment outcome. `wall_clock_ms` is informational only and is not
/// written to the CSV, which must be byte-identical across reruns.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub cell: usize,
    pub trial: usize,
    pub dim: usize,
    pub n: usize,
    pub epsilon: f64,
    pub sigma: f64,
    pub seed: u64,
    pub excess_risk: f64,
    pub estimator_calls: usize,
    pub filter_iterations: usize,
    pub iterations: usize,
    pub sigma_hat: Option<f64>,
    pub wall_clock_ms: f64,
}

pub const CSV_HEADER: &str =
    "cell,trial,d,n,epsilon,sigma,seed,excess_risk,estimator_calls,filter_iterations,iterations,sigma_hat";

/// Runs the whole grid: one record per `(cell, trial)` in deterministic
/// order, each under the derived seed `trial_seed(base_seed, cell, trial)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    init_thread_pool();
    let cells = config.grid.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.trials).map(move |t| (c, t)))
        .collect();
    jobs.par_iter()
        .map(|&(cell_idx, trial_idx)| run_trial(config, &cells[cell_idx], cell_idx, trial_idx))
        .collect()
}

fn run_trial(
    config: &ExperimentConfig,
    cell: &GridCell,
    cell_idx: usize,
    trial_idx: usize,
) -> Result<TrialRecord> {
    let started = Instant::now();
    let seed = trial_seed(config.base_seed, cell_idx as u64, trial_idx as u64);
    let dist = build_distribution(&config.distribution, cell)?;
    let domain = dist.domain().clone();
    let adversary = build_adversary(&config.adversary, cell)?;

    let clean = dist.sample_functions(cell.n, derive_seed(seed, STREAM_SAMPLES))?;
    let corrupted = corrupt(
        &clean,
        &adversary,
        cell.epsilon,
        &domain,
        derive_seed(seed, STREAM_ADVERSARY),
    )?;

    let mut constants = dist.constants();
    let mut sigma_hat = None;
    if config.algorithm.sigma_mode == "estimated" {
        let grads: Vec<Vec<f64>> = corrupted
            .functions()
            .iter()
            .map(|f| f.gradient(domain.center()))
            .collect();
        let filter_cfg = FilterConfig::new(cell.epsilon, config.algorithm.tau)?;
        let est = estimate_sigma_lower_bound(&grads, &filter_cfg)?;
        constants.sigma = est.sigma_hat;
        sigma_hat = Some(est.sigma_hat);
    }

    let mut solver = RobustSolverConfig::new(cell.epsilon, config.algorithm.tau, seed)?;
    solver.iterations = config.algorithm.iterations;
    let run: RobustRun<f64> = match config.algorithm.name.as_str() {
        "robust_net_pgd" => robust_net_pgd(corrupted.functions(), &domain, &constants, &solver)?,
        "robust_pgd" => robust_pgd(corrupted.functions(), &domain, &constants, &solver)?,
        "smooth_and_optimize" => smooth_and_optimize(
            corrupted.functions(),
            &domain,
            &constants,
            &solver,
            config.algorithm.smoothing_radius,
        )?,
        "naive_mean_pgd" => naive_mean_pgd(corrupted.functions(), &domain, &constants, &solver)?,
        other => {
            return Err(BenchError::InvalidConfig(format!(
                "unknown algorithm '{other}'"
            )))
        }
    };

    let excess_risk = dist.population_risk(run.solution())? - dist.population_min_risk()?;
    if excess_risk < -1e-9 {
        return Err(BenchError::InvalidConfig(format!(
            "negative excess risk {excess_risk}: closed-form minimum disagrees with the run"
        )));
    }

    Ok(TrialRecord {
        cell: cell_idx,
        trial: trial_idx,
        dim: cell.dim,
        n: cell.n,
        epsilon: cell.epsilon,
        sigma: cell.sigma,
        seed,
        excess_risk,
        estimator_calls: run.estimator.calls,
        filter_iterations: run.estimator.filter_iterations,
        iterations: run.iterations,
        sigma_hat,
        wall_clock_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Writes records as CSV. Floats print in shortest round-trip form, so equal
/// inputs give byte-identical files.
pub fn write_csv<W: Write>(records: &[TrialRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let sigma_hat = r.sigma_hat.map(|s| format!("{s:e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:e},{},{},{},{}",
            r.cell,
            r.trial,
            r.dim,
            r.n,
            r.epsilon,
            r.sigma,
            r.seed,
            r.excess_risk,
            r.estimator_calls,
            r.filter_iterations,
            r.iterations,
            sigma_hat
        )?;
    }
    Ok(())
}

pub fn write_csv_file(records: &[TrialRecord], path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(records, std::io::BufWriter::new(file))?;
    Ok(())
}

/// Reads a results CSV back into records (wall-clock is not stored and comes
/// back as zero).
pub fn read_csv<R: BufRead>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| BenchError::MalformedCsv("empty file".into()))?
        .map_err(BenchError::Io)?;
    if header.trim() != CSV_HEADER {
        return Err(BenchError::MalformedCsv(format!(
            "unexpected header '{header}'"
        )));
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(BenchError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(BenchError::MalformedCsv(format!(
                "line {}: expected 12 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_err =
            |what: &str| BenchError::MalformedCsv(format!("line {}: bad {what}", lineno + 2));
        out.push(TrialRecord {
            cell: fields[0].parse().map_err(|_| parse_err("cell"))?,
            trial: fields[1].parse().map_err(|_| parse_err("trial"))?,
            dim: fields[2].parse().map_err(|_| parse_err("d"))?,
            n: fields[3].parse().map_err(|_| parse_err("n"))?,
            epsilon: fields[4].parse().map_err(|_| parse_err("epsilon"))?,
            sigma: fields[5].parse().map_err(|_| parse_err("sigma"))?,
            seed: fields[6].parse().map_err(|_| parse_err("seed"))?,
            excess_risk: fields[7].parse().map_err(|_| parse_err("excess_risk"))?,
            estimator_calls: fields[8]
                .parse()
                .map_err(|_| parse_err("estimator_calls"))?,
            filter_iterations: fields[9]
                .parse()
                .map_err(|_| parse_err("filter_iterations"))?,
            iterations: fields[10].parse().map_err(|_| parse_err("iterations"))?,
            sigma_hat: if fields[11].is_empty() {
                None
            } else {
                Some(fields[11].parse().map_err(|_| parse_err("sigma_hat"))?)
            },
            wall_clock_ms: 0.0,
        });
    }
    Ok(out)
}

pub fn read_csv_file(path: &std::path::Path) -> Result<Vec<TrialRecord>> {
    let file = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(file))
}
