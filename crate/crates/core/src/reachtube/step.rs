use crate::integrator::{step_gradient, validated_step, GradientEnclosure, Order};
use crate::interval::{round, Interval, IntervalBox, IntervalMatrix};
use crate::metric::{ellipsoid_volume, optimal_frame, stretching_factor, CoordFrame};
use crate::model::OdeSystem;
use nalgebra::DMatrix;

use super::{ReachError, RunConfig};

/// Radius of the initial ellipsoid in its own metric.
pub const DELTA0: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StretchFactors {
    /// From the initial metric to the current one.
    pub lambda_0i: f64,
    /// From the initial metric to itself at the current time.
    pub lambda_i_m0: f64,
    /// Over the last step, previous metric to current one.
    pub lambda_prev_i: f64,
}

/// One time slice of the reachtube.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachsetStep {
    pub t: f64,
    pub center: Vec<f64>,
    pub frame: CoordFrame,
    pub delta: f64,
    pub delta_m0: f64,
    pub sigma: f64,
    pub sigma_m0: f64,
    pub lambda: StretchFactors,
    /// Center-error increment of this step in the current metric.
    pub epsilon: f64,
    pub enclosure: IntervalBox,
    pub vol_ellipsoid: f64,
    pub vol_ball: f64,
    pub vol_box: f64,
}

/// Box `c ± δ ‖row_j(A⁻¹)‖₂` containing `{x : ‖A(x − c)‖₂ ≤ δ}`.
pub fn box_hull_ellipsoid(frame: &CoordFrame, c: &[f64], delta: f64) -> IntervalBox {
    frame
        .inverse_row_norms()
        .iter()
        .zip(c)
        .map(|(&w, &cj)| {
            let r = round::mul_hi(w, delta);
            Interval::new(round::sub_lo(cj, r), round::add_hi(cj, r))
        })
        .collect()
}

/// `λ AᵀA/δ² + μ A₀ᵀA₀/δ₀²` in floating point.
fn combined_shape(a: &DMatrix<f64>, delta: f64, a0: &DMatrix<f64>, delta0: f64, lambda: f64) -> DMatrix<f64> {
    (a.transpose() * a) * (lambda / (delta * delta)) + (a0.transpose() * a0) * ((1.0 - lambda) / (delta0 * delta0))
}

/// Floating-point half-widths of the bounding box of `{d : dᵀ P d ≤ 1}`.
fn shape_half_widths(p: DMatrix<f64>) -> Option<Vec<f64>> {
    let inv = p.cholesky()?.inverse();
    let w: Vec<f64> = inv.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect();
    w.iter().all(|v| v.is_finite()).then_some(w)
}

fn logistic(s: f64) -> f64 {
    1.0 / (1.0 + (-s).exp())
}

/// Weight `λ` whose combined ellipsoid best tightens `current`, by a coarse
/// grid over `logit λ` refined with golden-section search.
fn best_weight(a: &DMatrix<f64>, delta: f64, a0: &DMatrix<f64>, delta0: f64, current: &[f64]) -> Option<f64> {
    let score = |s: f64| -> f64 {
        match shape_half_widths(combined_shape(a, delta, a0, delta0, logistic(s))) {
            Some(w) => w.iter().zip(current).map(|(w, c)| w.min(*c).max(f64::MIN_POSITIVE).ln()).sum(),
            None => f64::INFINITY,
        }
    };
    let grid: Vec<f64> = (0..=32).map(|k| -40.0 + 2.5 * k as f64).collect();
    let (mut best_s, mut best) = (0.0, f64::INFINITY);
    for &s in &grid {
        let v = score(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    if !best.is_finite() {
        return None;
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (best_s - 2.5, best_s + 2.5);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (score(x1), score(x2));
    for _ in 0..24 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = score(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = score(x2);
        }
    }
    let s = if f1.min(f2) < best { if f1 < f2 { x1 } else { x2 } } else { best_s };
    Some(logistic(s))
}

/// Rigorous half-widths of the box around `{d : ‖A d‖ ≤ δ, ‖A₀ d‖ ≤ δ₀}`.
///
/// Every such `d` satisfies `dᵀ(λ AᵀA/δ² + μ A₀ᵀA₀/δ₀²)d ≤ λ + μ`. With
/// `P ≈ BᵀB` from a floating-point Cholesky factor, `‖B d‖² ≤ λ + μ +
/// ‖BᵀB − P‖₂ ‖d‖²`, so the half-widths are that bound times the row norms
/// of `B⁻¹`.
fn combined_half_widths(frame: &CoordFrame, delta: f64, a0: &CoordFrame, delta0: f64, lambda: f64) -> Option<Vec<f64>> {
    let mu = 1.0 - lambda;
    let b = combined_shape(frame.a(), delta, a0.a(), delta0, lambda).cholesky()?.l().transpose();
    let quad = |a: &DMatrix<f64>, d: f64, w: f64| -> Option<IntervalMatrix> {
        let ia = IntervalMatrix::from_real(a);
        let scale = Interval::point(w).checked_div(Interval::point(d) * Interval::point(d)).ok()?;
        Some(ia.transpose().mat_mat(&ia).ok()?.scale(scale))
    };
    let p = quad(frame.a(), delta, lambda)?.add(&quad(a0.a(), delta0, mu)?).ok()?;
    let ib = IntervalMatrix::from_real(&b);
    let e = ib.transpose().mat_mat(&ib).ok()?.sub(&p).ok()?;
    let e_norm = round::sqrt_hi(round::mul_hi(e.norm_one_hi(), e.norm_inf_hi()));
    let a0_inv = a0.a_inv();
    let d_norm = round::mul_hi(delta0, round::sqrt_hi(round::mul_hi(a0_inv.norm_one_hi(), a0_inv.norm_inf_hi())));
    let kappa_sq = round::add_hi(round::add_hi(lambda, mu), round::mul_hi(e_norm, round::mul_hi(d_norm, d_norm)));
    let kappa = round::sqrt_hi(kappa_sq);
    let b_frame = CoordFrame::new(b, None).ok()?;
    let w: Vec<f64> = b_frame.inverse_row_norms().into_iter().map(|r| round::mul_hi(kappa, r)).collect();
    w.iter().all(|v| v.is_finite()).then_some(w)
}

/// Box around the intersection of the ellipsoid `‖A(x − c)‖ ≤ δ` and the
/// initial-metric ball `‖A₀(x − c)‖ ≤ δ₀`, never wider than the
/// componentwise intersection of their box hulls.
pub fn box_hull_intersection(frame: &CoordFrame, delta: f64, a0: &CoordFrame, delta0: f64, c: &[f64]) -> Option<IntervalBox> {
    let ell = box_hull_ellipsoid(frame, c, delta);
    let ball = box_hull_ellipsoid(a0, c, delta0);
    let base = ell.intersect(&ball)?;
    if delta == 0.0 || delta0 == 0.0 {
        return Some(base);
    }
    let current: Vec<f64> = base.iter().zip(c).map(|(iv, cj)| (iv.hi() - cj).max(cj - iv.lo())).collect();
    let refined = best_weight(frame.a(), delta, a0.a(), delta0, &current)
        .and_then(|l| combined_half_widths(frame, delta, a0, delta0, l));
    let Some(w) = refined else {
        return Some(base);
    };
    let tight: IntervalBox = w
        .iter()
        .zip(c)
        .map(|(&r, &cj)| Interval::new(round::sub_lo(cj, r), round::add_hi(cj, r)))
        .collect();
    Some(base.intersect(&tight).unwrap_or(base))
}

/// Upper bound of `‖A (y − c)‖₂` over the box `y`.
fn metric_radius(frame: &CoordFrame, y: &IntervalBox, c: &[f64]) -> Result<f64, ReachError> {
    let d = y.sub(&IntervalBox::from_point(c)).expect("same dimension");
    let ad = IntervalMatrix::from_real(frame.a())
        .mat_vec(&d)
        .expect("same dimension");
    Ok(ad.norm2_hi())
}

/// Mutable state of a running reachtube computation.
pub struct Pipeline<'a> {
    sys: &'a OdeSystem,
    order: Order,
    intersect: bool,
    exclude: Option<usize>,
    a0: CoordFrame,
    gradient: GradientEnclosure,
    last: ReachsetStep,
}

impl<'a> Pipeline<'a> {
    /// `A₀ = diag(1/r)`, `δ₀ = 1`, `σ₀ = 0`, `[F₀] = I`, `[X₀]` the hull of the initial ellipsoid.
    pub fn initialize(sys: &'a OdeSystem, cfg: &RunConfig) -> Result<Self, ReachError> {
        let order = cfg.validate(sys.dim())?;
        let init = &cfg.initial;
        let metric_err = |source| ReachError::Metric { t: 0.0, source };
        let a0 = CoordFrame::from_radii(init.radii()).map_err(metric_err)?;
        let enclosure = box_hull_ellipsoid(&a0, init.center(), DELTA0);
        let vol_ellipsoid = ellipsoid_volume(&a0, DELTA0, cfg.time_index).map_err(metric_err)?;
        let first = ReachsetStep {
            t: 0.0,
            center: init.center().to_vec(),
            frame: a0.clone(),
            delta: DELTA0,
            delta_m0: DELTA0,
            sigma: 0.0,
            sigma_m0: 0.0,
            lambda: StretchFactors {
                lambda_0i: 1.0,
                lambda_i_m0: 1.0,
                lambda_prev_i: 1.0,
            },
            epsilon: 0.0,
            vol_box: enclosure.volume(cfg.time_index),
            enclosure,
            vol_ellipsoid,
            vol_ball: vol_ellipsoid,
        };
        Ok(Self {
            sys,
            order,
            intersect: cfg.intersect,
            exclude: cfg.time_index,
            a0,
            gradient: GradientEnclosure::identity(sys.dim()),
            last: first,
        })
    }

    pub fn current(&self) -> &ReachsetStep {
        &self.last
    }

    pub fn gradient(&self) -> &GradientEnclosure {
        &self.gradient
    }

    pub fn initial_frame(&self) -> &CoordFrame {
        &self.a0
    }

    /// Advances to time `t_next`.
    pub fn step(&mut self, t_next: f64) -> Result<&ReachsetStep, ReachError> {
        let prev = &self.last;
        let h = t_next - prev.t;
        let t = t_next;
        let int_err = |source| ReachError::Integrator { t, source };
        let met_err = |source| ReachError::Metric { t, source };

        // 1. center (always fourth order; the configured order drives the gradient)
        let y = validated_step(self.sys, &IntervalBox::from_point(&prev.center), h, Order::Four)
            .map_err(int_err)?
            .y_next;
        let center = y.mid();

        // 2. gradient over the previous reachset
        let gradient = step_gradient(self.sys, &prev.enclosure, &self.gradient, h, self.order).map_err(int_err)?;

        // 3. optimal frame
        let frame = optimal_frame(&self.a0, &gradient.mid_total).map_err(met_err)?;

        // 4. stretching factors
        let a0_inv = self.a0.a_inv();
        let lambda = StretchFactors {
            lambda_0i: stretching_factor(&frame, &gradient.total, a0_inv).map_err(met_err)?,
            lambda_i_m0: stretching_factor(&self.a0, &gradient.total, a0_inv).map_err(met_err)?,
            lambda_prev_i: stretching_factor(&frame, &gradient.one_step, prev.frame.a_inv()).map_err(met_err)?,
        };
        let lambda_prev_m0 = stretching_factor(&self.a0, &gradient.one_step, a0_inv).map_err(met_err)?;

        // 5. center error
        let epsilon = metric_radius(&frame, &y, &center)?;
        let epsilon_m0 = metric_radius(&self.a0, &y, &center)?;
        let sigma = round::add_hi(round::mul_hi(lambda.lambda_prev_i, prev.sigma), epsilon);
        let sigma_m0 = round::add_hi(round::mul_hi(lambda_prev_m0, prev.sigma_m0), epsilon_m0);

        // 6. radii
        let delta = round::add_hi(round::mul_hi(lambda.lambda_0i, DELTA0), sigma);
        let delta_m0 = round::add_hi(round::mul_hi(lambda.lambda_i_m0, DELTA0), sigma_m0);
        if !(delta.is_finite() && delta_m0.is_finite()) {
            return Err(ReachError::BlowUp {
                t,
                reason: "non-finite radius".into(),
            });
        }

        // 7. reachset enclosure
        let enclosure = if self.intersect {
            box_hull_intersection(&frame, delta, &self.a0, delta_m0, &center).ok_or(ReachError::EmptyIntersection { t })?
        } else {
            box_hull_ellipsoid(&frame, &center, delta)
        };

        // 8. volumes
        let vol_ellipsoid = ellipsoid_volume(&frame, delta, self.exclude).map_err(met_err)?;
        let vol_ball = ellipsoid_volume(&self.a0, delta_m0, self.exclude).map_err(met_err)?;
        let vol_box = enclosure.volume(self.exclude);

        self.gradient = gradient;
        self.last = ReachsetStep {
            t,
            center,
            frame,
            delta,
            delta_m0,
            sigma,
            sigma_m0,
            lambda,
            epsilon,
            enclosure,
            vol_ellipsoid,
            vol_ball,
            vol_box,
        };
        Ok(&self.last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_scaled_frame() {
        let f = CoordFrame::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]), None).unwrap();
        let b = box_hull_ellipsoid(&f, &[1.0, -1.0], 1.0);
        assert_eq!(b[0], Interval::new(0.5, 1.5));
        assert_eq!(b[1], Interval::new(-2.0, 0.0));
    }

    #[test]
    fn initial_reachset_is_the_radius_box() {
        let sys = crate::model::parse_model("x1' = x2; x2' = -x1").unwrap();
        let init = crate::model::InitialSet::new(vec![1.0, 2.0], &[0.01, 0.02]).unwrap();
        let p = Pipeline::initialize(&sys, &RunConfig::new(init, 0.1, 1.0)).unwrap();
        let x0 = &p.current().enclosure;
        assert!(x0[0].contains(0.99) && x0[0].contains(1.01));
        assert!(x0[1].contains(1.98) && x0[1].contains(2.02));
        assert!(x0[0].width() < 0.02 * (1.0 + 1e-12));
    }
}
