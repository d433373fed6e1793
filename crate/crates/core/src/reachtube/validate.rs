//! Monte-Carlo soundness checks against floating-point reference trajectories.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::integrator::reference::Rk4;
use crate::model::{InitialSet, OdeSystem};
use crate::par::Parallelism;

use super::RunSummary;

/// Samples from the initial ellipsoid `{x : |(x_j − c_j)/r_j|₂ ≤ 1}`.
///
/// The first `boundary` points lie on the surface, the rest are uniform in
/// the interior.
pub fn sample_initial_set<R: Rng + ?Sized>(init: &InitialSet, count: usize, boundary: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = init.dim();
    (0..count)
        .map(|k| {
            let mut d: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let scale = if k < boundary {
                1.0
            } else {
                rng.random::<f64>().powf(1.0 / n as f64)
            };
            for ((v, c), r) in d.iter_mut().zip(init.center()).zip(init.radii()) {
                *v = c + r * scale * *v / norm;
            }
            d
        })
        .collect()
}

/// First point found outside an enclosure.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub sample: usize,
    pub step: usize,
    pub t: f64,
    pub component: usize,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContainmentReport {
    pub samples: usize,
    pub checks: usize,
    pub violations: usize,
    pub first: Option<Violation>,
    /// Samples whose reference trajectory diverged (not counted as violations).
    pub diverged: usize,
}

impl ContainmentReport {
    pub fn is_sound(&self) -> bool {
        self.violations == 0
    }
}

fn trajectory_check(sys: &OdeSystem, summary: &RunSummary, x0: &[f64], h_fine: f64, sample: usize) -> ContainmentReport {
    let mut rk = Rk4::new(sys);
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut report = ContainmentReport {
        samples: 1,
        ..Default::default()
    };
    for (step, s) in summary.steps.iter().enumerate() {
        rk.advance(&mut x, s.t - t, h_fine);
        t = s.t;
        if !x.iter().all(|v| v.is_finite()) {
            report.diverged = 1;
            break;
        }
        report.checks += 1;
        if let Some((j, iv)) = s.enclosure.iter().enumerate().find(|(j, iv)| !iv.contains(x[*j])) {
            report.violations += 1;
            if report.first.is_none() {
                report.first = Some(Violation {
                    sample,
                    step,
                    t,
                    component: j,
                    value: x[j],
                    lo: iv.lo(),
                    hi: iv.hi(),
                });
            }
        }
    }
    report
}

/// Integrates every sample with RK4 at `h_fine` and checks it against each
/// emitted `[X_i]`.
///
/// Emitted steps must be all steps for a full check (`output_every = 1`).
pub fn check_containment(
    sys: &OdeSystem,
    summary: &RunSummary,
    samples: &[Vec<f64>],
    h_fine: f64,
    par: Parallelism,
) -> ContainmentReport {
    let parts = par.map_range(samples.len(), |k| trajectory_check(sys, summary, &samples[k], h_fine, k));
    parts.into_iter().fold(ContainmentReport::default(), |mut acc, r| {
        acc.samples += r.samples;
        acc.checks += r.checks;
        acc.violations += r.violations;
        acc.diverged += r.diverged;
        if acc.first.is_none() {
            acc.first = r.first;
        }
        acc
    })
}

/// Largest ratio `‖A_i(χ(t_i) − x_i)‖₂ / σ_i` along the reference trajectory
/// `χ` of the initial center; sound runs give at most `1`.
///
/// Steps with `σ_i = 0` contribute `0` if the distance is zero and `∞` otherwise.
pub fn center_error_ratio(sys: &OdeSystem, summary: &RunSummary, x0: &[f64], h_fine: f64) -> f64 {
    let mut rk = Rk4::new(sys);
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut worst = 0.0f64;
    for s in &summary.steps {
        rk.advance(&mut x, s.t - t, h_fine);
        t = s.t;
        let d = nalgebra::DVector::from_iterator(x.len(), x.iter().zip(&s.center).map(|(a, b)| a - b));
        let dist = (s.frame.a() * d).norm();
        let ratio = if s.sigma > 0.0 {
            dist / s.sigma
        } else if dist == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(ratio);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reachtube::{run, RunConfig};
    use rand::SeedableRng;

    #[test]
    fn samples_lie_in_the_ellipsoid() {
        let init = InitialSet::new(vec![1.0, 2.0, 3.0], &[0.1, 0.2, 0.3]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let pts = sample_initial_set(&init, 500, 50, &mut rng);
        for (k, p) in pts.iter().enumerate() {
            let q: f64 = p
                .iter()
                .zip(init.center())
                .zip(init.radii())
                .map(|((x, c), r)| ((x - c) / r).powi(2))
                .sum();
            assert!(q <= 1.0 + 1e-12);
            if k < 50 {
                assert!((q - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_contraction_is_contained() {
        let sys = crate::model::parse_model("x1' = -x1 + x2; x2' = -x1 - x2").unwrap();
        let init = InitialSet::new(vec![1.0, 0.5], &[0.05]).unwrap();
        let cfg = RunConfig::new(init.clone(), 0.05, 2.0);
        let summary = run(&sys, &cfg);
        assert!(summary.completed);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pts = sample_initial_set(&init, 100, 20, &mut rng);
        let rep = check_containment(&sys, &summary, &pts, 1e-4, Parallelism::default());
        assert!(rep.is_sound(), "{:?}", rep.first);
        assert_eq!(rep.checks, 100 * summary.steps.len());
        assert!(center_error_ratio(&sys, &summary, init.center(), 1e-4) <= 1.0 + 1e-6);
    }
}
