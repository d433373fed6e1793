//! Validated Runge-Kutta propagation of the flow and of its deformation gradient.

mod apriori;
mod gradient;
pub mod reference;
mod step;

use thiserror::Error;

pub use apriori::{apriori_enclosure, PICARD_MAX_ITER};
pub use gradient::{step_gradient, GradientEnclosure};
pub use step::{validated_step, StepEnclosure};

use crate::interval::{Interval, IntervalBox, IntervalError};
use crate::model::EvalError;

/// Runge-Kutta order: explicit Euler, Heun, or classic RK4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    One,
    Two,
    Four,
}

impl Order {
    pub fn as_u32(self) -> u32 {
        match self {
            Order::One => 1,
            Order::Two => 2,
            Order::Four => 4,
        }
    }

    pub fn all() -> [Order; 3] {
        [Order::One, Order::Two, Order::Four]
    }
}

impl TryFrom<u32> for Order {
    type Error = IntegratorError;

    fn try_from(p: u32) -> Result<Self, Self::Error> {
        match p {
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            4 => Ok(Order::Four),
            _ => Err(IntegratorError::UnsupportedOrder(p)),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u32())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("unsupported order {0} (allowed: 1, 2, 4)")]
    UnsupportedOrder(u32),
    #[error("a priori enclosure not verified for x{} after {iterations} iterations with h = {h}; reduce dt", component + 1)]
    StepTooLarge {
        component: usize,
        h: f64,
        iterations: usize,
    },
    #[error("interval evaluation failed in `{}`: {}", .0.location, .0.source)]
    Eval(EvalError),
    #[error("{0}")]
    Interval(#[from] IntervalError),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
}

impl From<EvalError> for IntegratorError {
    fn from(e: EvalError) -> Self {
        IntegratorError::Eval(e)
    }
}

/// `x + a * k` componentwise.
fn axpy(x: &IntervalBox, a: Interval, k: &IntervalBox) -> IntervalBox {
    x.iter().zip(k).map(|(xi, ki)| *xi + a * *ki).collect()
}

/// `h^k / k!` for `k = 0..=m`, enclosed.
fn taylor_coefficients(h: f64, m: usize) -> Vec<Interval> {
    let h = Interval::point(h);
    let mut out = Vec::with_capacity(m + 1);
    let mut c = Interval::ONE;
    out.push(c);
    for k in 1..=m {
        c = (c * h)
            .checked_div(Interval::point(k as f64))
            .expect("nonzero divisor");
        out.push(c);
    }
    out
}
