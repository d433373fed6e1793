use crate::integrator::Order;
use crate::model::InitialSet;

use super::ReachError;

/// Default blow-up cap, relative to the initial box volume.
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub initial: InitialSet,
    pub dt: f64,
    pub horizon: f64,
    /// Runge-Kutta order; only 1, 2 and 4 are accepted by [`RunConfig::validate`].
    pub order: u32,
    pub time_index: Option<usize>,
    /// Absolute box-volume cap; `None` means `DEFAULT_BLOWUP_FACTOR` times the initial box volume.
    pub blowup_threshold: Option<f64>,
    /// Keep every n-th step in the summary (averages always use all steps).
    pub output_every: usize,
    /// Intersect the ellipsoid hull with the initial-metric ball hull.
    pub intersect: bool,
}

impl RunConfig {
    pub fn new(initial: InitialSet, dt: f64, horizon: f64) -> Self {
        Self {
            initial,
            dt,
            horizon,
            order: 1,
            time_index: None,
            blowup_threshold: None,
            output_every: 1,
            intersect: true,
        }
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_time_index(mut self, time_index: Option<usize>) -> Self {
        self.time_index = time_index;
        self
    }

    pub fn with_blowup_threshold(mut self, v: Option<f64>) -> Self {
        self.blowup_threshold = v;
        self
    }

    pub fn with_output_every(mut self, every: usize) -> Self {
        self.output_every = every;
        self
    }

    pub fn with_intersection(mut self, on: bool) -> Self {
        self.intersect = on;
        self
    }

    /// Number of steps to reach the horizon; the last one may be partial.
    pub fn step_count(&self) -> usize {
        let k = self.horizon / self.dt;
        let r = k.round();
        if (k - r).abs() <= 1e-9 * r.max(1.0) {
            r as usize
        } else {
            k.ceil() as usize
        }
    }

    /// Time of step `i` (exactly `horizon` for the last one).
    pub fn time_of(&self, i: usize) -> f64 {
        if i >= self.step_count() {
            self.horizon
        } else {
            i as f64 * self.dt
        }
    }

    pub fn validate(&self, dim: usize) -> Result<Order, ReachError> {
        let order = Order::try_from(self.order).map_err(|e| ReachError::Config(e.to_string()))?;
        let bad = |m: String| Err(ReachError::Config(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.output_every == 0 {
            return bad("output interval must be at least 1".into());
        }
        if self.initial.dim() != dim {
            return bad(format!(
                "initial set has dimension {}, model has {dim}",
                self.initial.dim()
            ));
        }
        if let Some(t) = self.time_index {
            if t >= dim {
                return bad(format!("time variable x{} out of range", t + 1));
            }
        }
        if let Some(b) = self.blowup_threshold {
            if !(b > 0.0) {
                return bad(format!("blow-up threshold must be positive, got {b}"));
            }
        }
        Ok(order)
    }
}
