use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numeric core is generic over.
///
/// Implemented for `f32` and `f64`. Constants and random draws are produced
/// in `f64` and converted, so the two instantiations consume identical
/// generator streams.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in scalar type")
}

#[cfg(test)]
mod tests {
    use crate::domain::FeasibleDomain;
    use crate::estimators::{filter_mean, FilterConfig};
    use crate::optimizer::{pgd_biased, PgdConfig, StepSchedule};

    // The whole numeric core must instantiate at f32 as well; run a small
    // filter + descent pipeline there.
    #[test]
    fn single_precision_pipeline_works() {
        let mut points: Vec<Vec<f32>> = (0..50).map(|i| vec![(i % 5) as f32, 1.0]).collect();
        points[0] = vec![100.0, 100.0];
        let cfg = FilterConfig::<f32>::new(0.05, 0.1).unwrap();
        let report = filter_mean(&points, &cfg).unwrap();
        assert!(report.estimate[0] >= 0.0 && report.estimate[0] <= 4.0);
        assert!((report.estimate[1] - 1.0).abs() < 1e-3);

        let domain = FeasibleDomain::<f32>::centered_ball(2, 1.0).unwrap();
        let cfg = PgdConfig {
            schedule: StepSchedule::ConstantSmooth { smoothness: 1.0f32 },
            iterations: 20,
        };
        let run = pgd_biased(|w: &[f32]| Ok(w.to_vec()), &domain, &cfg, &[0.5, -0.5]).unwrap();
        assert!(run.average.iter().all(|x| x.abs() < 1e-3));
    }
}
