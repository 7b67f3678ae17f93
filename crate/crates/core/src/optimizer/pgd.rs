//! Projected gradient descent with a biased gradient oracle.

use crate::domain::FeasibleDomain;
use crate::linalg::{add_scaled, norm, scale_in_place};
use crate::{real, Error, Real, Result};

/// Constant step-size schedules.
///
/// `ConstantSmooth` uses `eta = 1/smoothness` and, against an oracle whose
/// bias never exceeds `B`, guarantees excess risk at most
/// `smoothness * D^2 / (2T) + B * D`. `ConstantLipschitz` uses
/// `eta = D / ((L + B) sqrt(T))` and guarantees
/// `D * L / sqrt(T) + (1/sqrt(T) + 1) * B * D`.
#[derive(Debug, Clone, Copy)]
pub enum StepSchedule<F> {
    ConstantSmooth { smoothness: F },
    ConstantLipschitz { lipschitz: F, bias_bound: F },
}

#[derive(Debug, Clone, Copy)]
pub struct PgdConfig<F> {
    pub schedule: StepSchedule<F>,
    pub iterations: usize,
}

/// One row of the optimization trace.
#[derive(Debug, Clone)]
pub struct PgdIteration<F> {
    pub iteration: usize,
    pub gradient_norm: F,
    pub iterate: Vec<F>,
}

#[derive(Debug, Clone)]
pub struct PgdRun<F> {
    /// Unweighted average of the post-projection iterates `w_1 ... w_T`.
    pub average: Vec<F>,
    pub final_iterate: Vec<F>,
    pub step_size: F,
    pub trace: Vec<PgdIteration<F>>,
}

/// The guaranteed excess-risk bound of the smooth schedule.
pub fn smooth_schedule_bound<F: Real>(smoothness: F, diameter: F, bias: F, iterations: usize) -> F {
    smoothness * diameter * diameter / (real::<F>(2.0) * real::<F>(iterations as f64))
        + bias * diameter
}

/// The guaranteed excess-risk bound of the Lipschitz schedule.
pub fn lipschitz_schedule_bound<F: Real>(
    lipschitz: F,
    diameter: F,
    bias: F,
    iterations: usize,
) -> F {
    let root_t = real::<F>(iterations as f64).sqrt();
    diameter * lipschitz / root_t + (F::one() / root_t + F::one()) * bias * diameter
}

/// Runs projected gradient descent from `w0` against `oracle` and returns
/// the average of the `T` post-projection iterates.
///
/// Every iterate is kept feasible by exact projection; the iterate trace is
/// returned in full so callers can stream or audit it.
pub fn pgd_biased<F, O>(
    mut oracle: O,
    domain: &FeasibleDomain<F>,
    config: &PgdConfig<F>,
    w0: &[F],
) -> Result<PgdRun<F>>
where
    F: Real,
    O: FnMut(&[F]) -> Result<Vec<F>>,
{
    if config.iterations == 0 {
        return Err(Error::InvalidArgument(
            "iteration count must be at least one".into(),
        ));
    }
    if w0.len() != domain.dim() {
        return Err(Error::InvalidArgument(
            "start dimension must match domain".into(),
        ));
    }
    let feas_tol = real::<F>(1e-9) * (F::one() + norm(w0));
    if !domain.contains(w0, feas_tol) {
        return Err(Error::InvalidArgument("start point is infeasible".into()));
    }

    let t = config.iterations;
    let eta = match config.schedule {
        StepSchedule::ConstantSmooth { smoothness } => {
            if !(smoothness > F::zero()) {
                return Err(Error::InvalidArgument(
                    "smooth schedule needs positive smoothness".into(),
                ));
            }
            F::one() / smoothness
        }
        StepSchedule::ConstantLipschitz {
            lipschitz,
            bias_bound,
        } => {
            if lipschitz < F::zero() || bias_bound < F::zero() {
                return Err(Error::InvalidArgument(
                    "schedule constants must be nonnegative".into(),
                ));
            }
            let denom = (lipschitz + bias_bound) * real::<F>(t as f64).sqrt();
            if denom > F::zero() {
                domain.diameter() / denom
            } else {
                // Zero Lipschitz constant and zero bias: the objective is
                // constant, any step size works. Stay put.
                F::zero()
            }
        }
    };

    let mut w = w0.to_vec();
    let mut sum = vec![F::zero(); w.len()];
    let mut trace = Vec::with_capacity(t);
    for iteration in 1..=t {
        let g = oracle(&w)?;
        if g.len() != w.len() {
            return Err(Error::InvalidArgument(
                "oracle returned wrong dimension".into(),
            ));
        }
        let mut y = w.clone();
        add_scaled(&mut y, &g, -eta);
        w = domain.project(&y);
        debug_assert!(domain.contains(&w, real(1e-9)));
        add_scaled(&mut sum, &w, F::one());
        trace.push(PgdIteration {
            iteration,
            gradient_norm: norm(&g),
            iterate: w.clone(),
        });
    }
    scale_in_place(&mut sum, F::one() / real::<F>(t as f64));

    Ok(PgdRun {
        average: sum,
        final_iterate: w,
        step_size: eta,
        trace,
    })
}
