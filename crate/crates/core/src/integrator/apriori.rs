use super::{axpy, IntegratorError};
use crate::interval::{Interval, IntervalBox};
use crate::model::OdeSystem;

pub const PICARD_MAX_ITER: usize = 20;
const INITIAL_FACTOR: f64 = 1.1;
const INITIAL_ABS: f64 = 1e-15;
const GROWTH: f64 = 1.5;
const REFINEMENTS: usize = 2;

/// Box `Y ⊇ x` with `x + [0,h] f(Y) ⊆ Y`; every trajectory from `x` stays in
/// `Y` on `[0, h]`. The returned box is the verified image `x + [0,h] f(Y)`
/// contracted by a few extra Picard sweeps.
pub fn apriori_enclosure(sys: &OdeSystem, x: &IntervalBox, h: f64) -> Result<IntervalBox, IntegratorError> {
    assert!(h > 0.0, "step size must be positive");
    let span = Interval::new(0.0, h);
    let mut y = x.inflate(INITIAL_FACTOR, INITIAL_ABS);
    let mut bad = 0;
    for _ in 0..PICARD_MAX_ITER {
        let z = axpy(x, span, &sys.eval_rhs_interval(&y)?);
        if let Some(j) = (0..x.dim()).find(|&j| !z[j].is_finite()) {
            return Err(IntegratorError::StepTooLarge {
                component: j,
                h,
                iterations: PICARD_MAX_ITER,
            });
        }
        if z.is_subset_of(&y) {
            let mut z = z;
            for _ in 0..REFINEMENTS {
                z = axpy(x, span, &sys.eval_rhs_interval(&z)?);
            }
            return Ok(z);
        }
        bad = (0..x.dim()).find(|&j| !z[j].is_subset_of(&y[j])).unwrap_or(0);
        let tiny = f64::MIN_POSITIVE + 1e-15 * y.iter().map(|c| c.mag()).fold(0.0, f64::max);
        y = z.inflate(GROWTH, tiny);
    }
    Err(IntegratorError::StepTooLarge {
        component: bad,
        h,
        iterations: PICARD_MAX_ITER,
    })
}
