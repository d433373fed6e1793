use log::{debug, warn};

use crate::model::OdeSystem;

use super::{Pipeline, ReachError, ReachsetStep, RunConfig, DEFAULT_BLOWUP_FACTOR};

/// Result of a reachtube run; on failure it still holds the computed prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    /// Emitted steps (every `output_every`-th one, plus the last computed).
    pub steps: Vec<ReachsetStep>,
    /// Mean box volume over all computed steps, step 0 included.
    pub average_volume: f64,
    pub completed: bool,
    pub failure_time: Option<f64>,
    pub failure: Option<ReachError>,
    /// Coordinates whose zero radius was raised to the floor.
    pub floored: Vec<usize>,
    /// Number of computed steps, step 0 included.
    pub steps_computed: usize,
}

impl RunSummary {
    fn failed(err: ReachError, cfg: &RunConfig) -> Self {
        Self {
            steps: Vec::new(),
            average_volume: f64::NAN,
            completed: false,
            failure_time: err.time().or(Some(0.0)),
            failure: Some(err),
            floored: cfg.initial.floored().to_vec(),
            steps_computed: 0,
        }
    }
}

/// Box volume the default blow-up cap is relative to. Floored coordinates
/// count with the largest given radius, since the floor carries no scale.
fn reference_volume(cfg: &RunConfig, initial_box: f64) -> f64 {
    let floored = cfg.initial.floored();
    if floored.is_empty() {
        return initial_box;
    }
    let radii = cfg.initial.radii();
    let widest = radii
        .iter()
        .enumerate()
        .filter(|(j, _)| !floored.contains(j))
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);
    radii
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != cfg.time_index)
        .map(|(j, &r)| 2.0 * if floored.contains(&j) { widest.max(r) } else { r })
        .product()
}

/// Computes the reachtube of `sys` from `cfg.initial` up to `cfg.horizon`.
///
/// Deterministic: identical inputs give bitwise-identical summaries.
pub fn run(sys: &OdeSystem, cfg: &RunConfig) -> RunSummary {
    let mut pipeline = match Pipeline::initialize(sys, cfg) {
        Ok(p) => p,
        Err(e) => return RunSummary::failed(e, cfg),
    };
    let first = pipeline.current().clone();
    let threshold = cfg
        .blowup_threshold
        .unwrap_or_else(|| DEFAULT_BLOWUP_FACTOR * reference_volume(cfg, first.vol_box));
    let n_steps = cfg.step_count();
    let mut volume_sum = first.vol_box;
    let mut computed = 1usize;
    let mut steps = vec![first];
    let mut failure = None;

    for i in 1..=n_steps {
        let t = cfg.time_of(i);
        let outcome = pipeline.step(t).and_then(|s| {
            if !s.vol_box.is_finite() || s.vol_box > threshold {
                Err(ReachError::BlowUp {
                    t,
                    reason: format!("box volume {:e} exceeds {:e}", s.vol_box, threshold),
                })
            } else {
                Ok(s.clone())
            }
        });
        match outcome {
            Ok(s) => {
                volume_sum += s.vol_box;
                computed += 1;
                if i % cfg.output_every == 0 || i == n_steps {
                    steps.push(s);
                }
            }
            Err(e) => {
                warn!("{}: {e}", sys.name());
                let last = pipeline.current();
                if steps.last().map(|s| s.t) != Some(last.t) {
                    steps.push(last.clone());
                }
                failure = Some(e);
                break;
            }
        }
        if i % 1000 == 0 {
            debug!("{}: t = {t}, vol_box = {:e}", sys.name(), steps.last().map_or(0.0, |s| s.vol_box));
        }
    }

    RunSummary {
        steps,
        average_volume: volume_sum / computed as f64,
        completed: failure.is_none(),
        failure_time: failure.as_ref().and_then(ReachError::time),
        failure,
        floored: cfg.initial.floored().to_vec(),
        steps_computed: computed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, InitialSet};

    #[test]
    fn zero_field_keeps_the_initial_box() {
        let sys = parse_model("x1' = 0; x2' = 0").unwrap();
        let cfg = RunConfig::new(InitialSet::new(vec![1.0, -1.0], &[0.1]).unwrap(), 0.1, 2.0);
        let s = run(&sys, &cfg);
        assert!(s.completed);
        assert_eq!(s.steps_computed, 21);
        assert_eq!(s.steps.len(), 21);
        let v0 = s.steps[0].vol_box;
        assert!((s.average_volume - v0).abs() <= 1e-6 * v0);
    }

    #[test]
    fn thinning_keeps_last_step() {
        let sys = parse_model("x1' = -x1").unwrap();
        let cfg = RunConfig::new(InitialSet::new(vec![1.0], &[0.1]).unwrap(), 0.1, 1.0).with_output_every(3);
        let s = run(&sys, &cfg);
        let ts: Vec<f64> = s.steps.iter().map(|s| s.t).collect();
        assert_eq!(ts.len(), 5);
        assert_eq!(*ts.last().unwrap(), 1.0);
        assert_eq!(s.steps_computed, 11);
    }

    #[test]
    fn invalid_config_fails_without_steps() {
        let sys = parse_model("x1' = -x1").unwrap();
        let cfg = RunConfig::new(InitialSet::new(vec![1.0], &[0.1]).unwrap(), 0.1, 1.0).with_order(3);
        let s = run(&sys, &cfg);
        assert!(!s.completed);
        assert!(matches!(s.failure, Some(ReachError::Config(_))));
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = parse_model("x1' = x1").unwrap();
        let cfg = RunConfig::new(InitialSet::new(vec![1.0], &[0.1]).unwrap(), 0.1, 30.0)
            .with_blowup_threshold(Some(10.0));
        let s = run(&sys, &cfg);
        assert!(!s.completed);
        let t = s.failure_time.unwrap();
        assert!(t > 2.0 && t < 30.0, "{t}");
    }
}
