//! Projected gradient descent with robust gradient estimation.
//!
//! [`pgd_biased`] is the core loop: projected steps against any (possibly
//! biased) gradient oracle, averaging the post-projection iterates. On top of
//! it, [`robust_net_pgd`] estimates gradients by filtering at the nearest
//! point of an implicit coordinate grid and memoizes those estimates,
//! [`robust_pgd`] filters at the iterate itself, [`smooth_and_optimize`]
//! handles nonsmooth population risks by ball-convolution of the samples, and
//! [`naive_mean_pgd`] is the non-robust sample-mean baseline.

mod net;
mod pgd;
mod robust;
mod smoothing;

pub use net::{nearest_net_point, net_coordinates, NetConfig};
pub use pgd::{
    lipschitz_schedule_bound, pgd_biased, smooth_schedule_bound, PgdConfig, PgdIteration, PgdRun,
    StepSchedule,
};
pub use robust::{
    naive_mean_pgd, robust_net_pgd, robust_pgd, smooth_and_optimize, EstimatorStats, RobustRun,
    RobustSolverConfig,
};
pub use smoothing::{sample_uniform_ball, sample_uniform_ball_with, smoothing_plan, SmoothingPlan};
