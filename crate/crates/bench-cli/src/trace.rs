//! Diagnostic dumps: per-iteration filter traces and optimizer iterate
//! traces, one CSV row per iteration.

use std::io::Write;

use robust_sco::estimators::FilterReport;
use robust_sco::optimizer::RobustRun;
use robust_sco::problems::FunctionDistribution;

/// One row per filtering iteration: iteration, retained mass, top covariance
/// eigenvalue, tail threshold, and the max tail score.
pub fn write_filter_trace_csv<W: Write>(
    report: &FilterReport<f64>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "iteration,mass,top_eigenvalue,threshold,max_score")?;
    for row in &report.trace {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e}",
            row.iteration, row.mass, row.top_eigenvalue, row.threshold, row.max_score
        )?;
    }
    Ok(())
}

/// One row per optimizer iteration: iteration, gradient-estimate norm, the
/// closed-form risk when the family provides one, and the distance to a
/// known optimum when given.
pub fn write_iterate_trace_csv<W: Write>(
    run: &RobustRun<f64>,
    dist: Option<&FunctionDistribution<f64>>,
    optimum: Option<&[f64]>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "iteration,gradient_norm,risk,distance_to_optimum")?;
    for row in &run.pgd.trace {
        let risk = dist
            .and_then(|d| d.population_risk(&row.iterate).ok())
            .map(|r| format!("{r:e}"))
            .unwrap_or_default();
        let distance = optimum
            .map(|w| {
                let d2: f64 = row
                    .iterate
                    .iter()
                    .zip(w.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                format!("{:e}", d2.sqrt())
            })
            .unwrap_or_default();
        writeln!(
            out,
            "{},{:e},{},{}",
            row.iteration, row.gradient_norm, risk, distance
        )?;
    }
    Ok(())
}
