use super::{apriori_enclosure, axpy, taylor_coefficients, IntegratorError, Order};
use crate::interval::{Interval, IntervalBox};
use crate::model::OdeSystem;

/// Enclosure of one validated step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepEnclosure {
    /// Encloses the flow at `t + h` of every point of the start set.
    pub y_next: IntervalBox,
    /// Encloses every trajectory from the start set on `[t, t + h]`.
    pub apriori: IntervalBox,
    pub accepted_h: f64,
}

/// RK increment `K` such that one step is `x + h K`.
pub(super) fn rk_increment(sys: &OdeSystem, x: &IntervalBox, h: f64, order: Order) -> Result<IntervalBox, IntegratorError> {
    let hi = Interval::point(h);
    let half = Interval::point(0.5 * h);
    let k1 = sys.eval_rhs_interval(x)?;
    Ok(match order {
        Order::One => k1,
        Order::Two => {
            let k2 = sys.eval_rhs_interval(&axpy(x, hi, &k1))?;
            k1.iter().zip(&k2).map(|(a, b)| (*a + *b) * 0.5).collect()
        }
        Order::Four => {
            let k2 = sys.eval_rhs_interval(&axpy(x, half, &k1))?;
            let k3 = sys.eval_rhs_interval(&axpy(x, half, &k2))?;
            let k4 = sys.eval_rhs_interval(&axpy(x, hi, &k3))?;
            let six = Interval::point(6.0);
            (0..x.dim())
                .map(|j| {
                    (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]).checked_div(six)
                })
                .collect::<Result<IntervalBox, _>>()?
        }
    })
}

/// `L^k` over `y`: the natural extension intersected with the mean-value
/// form `L^k(m) + DL^k(y)(y − m)` about the midpoint `m`.
fn remainder_enclosure(sys: &OdeSystem, k: usize, y: &IntervalBox) -> Result<IntervalBox, IntegratorError> {
    let natural = sys.eval_lie_interval(k, y)?;
    let m = y.mid();
    let at_mid = sys.eval_lie_interval(k, &IntervalBox::from_point(&m))?;
    let slope = sys.eval_lie_jacobian_interval(k, y)?;
    let offset = y.sub(&IntervalBox::from_point(&m))?;
    let mv = at_mid.add(&slope.mat_vec(&offset)?)?;
    Ok(natural.intersect(&mv).unwrap_or(natural))
}

/// One validated step of size `h` from the start set `x`.
///
/// Result: `x + hK(x) + G(x) + R`, intersected with the a priori box, where
/// `G = Σ_{k≤p} h^k/k! L^k − hK` is the gap between the degree-`p` Taylor
/// polynomial and the RK increment over the start set, and `R` encloses the
/// Lagrange remainder `h^{p+1}/(p+1)! L^{p+1}` over the a priori box.
pub fn validated_step(sys: &OdeSystem, x: &IntervalBox, h: f64, order: Order) -> Result<StepEnclosure, IntegratorError> {
    let p = order.as_u32() as usize;
    let apriori = apriori_enclosure(sys, x, h)?;
    let coef = taylor_coefficients(h, p + 1);
    let hk = rk_increment(sys, x, h, order)?;
    let hi = Interval::point(h);

    let mut gap: Vec<Interval> = hk.iter().map(|k| -(hi * *k)).collect();
    for (k, c) in coef.iter().enumerate().take(p + 1).skip(1) {
        let lk = sys.eval_lie_interval(k, x)?;
        for (g, l) in gap.iter_mut().zip(&lk) {
            *g = *g + *c * *l;
        }
    }
    let rem = remainder_enclosure(sys, p + 1, &apriori)?;

    let y: IntervalBox = (0..x.dim())
        .map(|j| x[j] + hi * hk[j] + gap[j] + coef[p + 1] * rem[j])
        .collect();
    if !y.is_finite() {
        return Err(IntegratorError::NonFinite("truncation bound"));
    }
    // both boxes enclose the flow, so they cannot be disjoint
    let y_next = y.intersect(&apriori).unwrap_or(y);
    Ok(StepEnclosure {
        y_next,
        apriori,
        accepted_h: h,
    })
}
