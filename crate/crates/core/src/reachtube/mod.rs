//! Reachtube construction: ball ∩ ellipsoid reachsets with center-error absorption.

mod config;
mod run;
mod step;
pub mod validate;

use thiserror::Error;

pub use config::{RunConfig, DEFAULT_BLOWUP_FACTOR};
pub use run::{run, RunSummary};
pub use step::{box_hull_ellipsoid, box_hull_intersection, Pipeline, ReachsetStep, StretchFactors};

use crate::integrator::IntegratorError;
use crate::metric::MetricError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReachError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("integration failed at t = {t}: {source}")]
    Integrator { t: f64, source: IntegratorError },
    #[error("metric computation failed at t = {t}: {source}")]
    Metric { t: f64, source: MetricError },
    #[error("empty reachset intersection at t = {t} (internal soundness error)")]
    EmptyIntersection { t: f64 },
    #[error("volume blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },
}

impl ReachError {
    /// Time of the failing step, if any.
    pub fn time(&self) -> Option<f64> {
        match self {
            ReachError::Config(_) => None,
            ReachError::Integrator { t, .. }
            | ReachError::Metric { t, .. }
            | ReachError::EmptyIntersection { t }
            | ReachError::BlowUp { t, .. } => Some(*t),
        }
    }
}
