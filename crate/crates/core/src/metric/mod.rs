//! Coordinate frames of ellipsoidal metrics, rigorous stretching factors, and volumes.
//!
//! A frame `A` induces the metric `M = AᵀA` and the norm `‖x‖_M = ‖A x‖₂`.

mod eigen;
mod frame;
mod volume;

use thiserror::Error;

pub use eigen::{gershgorin_bound, lambda_max_bound, spectral_norm_bound, stretching_factor};
pub use frame::{optimal_frame, CoordFrame, MAX_CONDITION};
pub use volume::{ellipsoid_volume, unit_ball_volume};

use crate::interval::IntervalError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("degenerate frame: condition number {cond:e} exceeds the limit")]
    Degenerate { cond: f64 },
    #[error("matrix inverse could not be certified")]
    NotCertified,
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("{0}")]
    Interval(#[from] IntervalError),
}
