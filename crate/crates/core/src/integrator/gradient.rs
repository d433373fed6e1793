use nalgebra::DMatrix;

use super::{apriori_enclosure, taylor_coefficients, IntegratorError, Order};
use crate::interval::{round, Interval, IntervalBox, IntervalMatrix};
use crate::model::OdeSystem;

/// Interval deformation gradient in Lohner form `C + Q·R`: a point part
/// plus an error term kept in a moving orthogonal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientEnclosure {
    pub base: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: IntervalMatrix,
    /// Encloses the gradient of the flow from the initial set to now.
    pub total: IntervalMatrix,
    /// Point representative of `total` along the center trajectory.
    pub mid_total: DMatrix<f64>,
    /// Encloses the gradient of the last step over the last start set.
    pub one_step: IntervalMatrix,
    pub mid_one_step: DMatrix<f64>,
}

impl GradientEnclosure {
    pub fn identity(n: usize) -> Self {
        Self {
            base: DMatrix::identity(n, n),
            q: DMatrix::identity(n, n),
            r: IntervalMatrix::zeros(n, n),
            total: IntervalMatrix::identity(n),
            mid_total: DMatrix::identity(n, n),
            one_step: IntervalMatrix::identity(n),
            mid_one_step: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// `‖QᵀQ − I‖∞` in floating point.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim();
        let d = self.q.transpose() * &self.q - DMatrix::identity(n, n);
        d.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

struct Tableau {
    a: &'static [&'static [f64]],
    b: &'static [f64],
}

const EULER: Tableau = Tableau { a: &[&[]], b: &[1.0] };
const HEUN: Tableau = Tableau {
    a: &[&[], &[1.0]],
    b: &[0.5, 0.5],
};
const RK4: Tableau = Tableau {
    a: &[&[], &[0.5], &[0.0, 0.5], &[0.0, 0.0, 1.0]],
    b: &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
};

fn tableau(order: Order) -> &'static Tableau {
    match order {
        Order::One => &EULER,
        Order::Two => &HEUN,
        Order::Four => &RK4,
    }
}

/// Floating-point RK step of the flow together with its variational
/// equation, started from `(c, I)`; returns the one-step gradient.
fn point_variational(sys: &OdeSystem, c: &[f64], h: f64, order: Order) -> DMatrix<f64> {
    let n = c.len();
    let tab = tableau(order);
    let mut ky: Vec<Vec<f64>> = Vec::with_capacity(tab.b.len());
    let mut kf: Vec<DMatrix<f64>> = Vec::with_capacity(tab.b.len());
    for a in tab.a {
        let mut y = c.to_vec();
        let mut f = DMatrix::identity(n, n);
        for (j, &aj) in a.iter().enumerate() {
            if aj != 0.0 {
                for (yi, ki) in y.iter_mut().zip(&ky[j]) {
                    *yi += h * aj * ki;
                }
                f += &kf[j] * (h * aj);
            }
        }
        kf.push(sys.eval_jacobian(&y) * f);
        ky.push(sys.eval_rhs(&y));
    }
    let mut out = DMatrix::identity(n, n);
    for (bj, k) in tab.b.iter().zip(&kf) {
        out += k * (h * bj);
    }
    out
}

/// Interval one-step gradient over the start set `x`.
///
/// Differentiating the order-`p` Taylor expansion of the flow in the initial
/// state gives `Σ_{k≤p} h^k/k! DL^k(x) + h^{p+1}/(p+1)! DL^{p+1}(Y) [Φ]`, with
/// `DL^k` the Jacobian of the k-th Lie derivative, `Y` the a priori
/// enclosure and `[Φ] = I ± (e^{h‖J(Y)‖∞} − 1)` enclosing the gradient
/// on the whole step.
fn interval_one_step(sys: &OdeSystem, x: &IntervalBox, h: f64, order: Order) -> Result<IntervalMatrix, IntegratorError> {
    let n = x.dim();
    let p = order.as_u32() as usize;
    let y = apriori_enclosure(sys, x, h)?;
    let j = sys.eval_jacobian_interval(&y)?;
    if !j.is_finite() {
        return Err(IntegratorError::NonFinite("Jacobian enclosure"));
    }
    let coef = taylor_coefficients(h, p + 1);

    let growth = round::mul_hi(h, j.norm_inf_hi());
    let e = round::sub_hi(Interval::point(growth).exp().hi(), 1.0).max(0.0);
    let phi = IntervalMatrix::from_fn(n, n, |r, c| {
        let base = if r == c { 1.0 } else { 0.0 };
        Interval::new(round::sub_lo(base, e), round::add_hi(base, e))
    });

    let mut acc = IntervalMatrix::identity(n);
    for (k, c) in coef.iter().enumerate().take(p + 1).skip(1) {
        acc = acc.add(&sys.eval_lie_jacobian_interval(k, x)?.scale(*c))?;
    }
    let tail = sys.eval_lie_jacobian_interval(p + 1, &y)?.mat_mat(&phi)?.scale(coef[p + 1]);
    let out = acc.add(&tail)?;
    if !out.is_finite() {
        return Err(IntegratorError::NonFinite("gradient enclosure"));
    }
    Ok(out)
}

/// Advances the deformation gradient by one step over the reachset enclosure `x`.
pub fn step_gradient(
    sys: &OdeSystem,
    x: &IntervalBox,
    g: &GradientEnclosure,
    h: f64,
    order: Order,
) -> Result<GradientEnclosure, IntegratorError> {
    let one_step = interval_one_step(sys, x, h, order)?;
    let a_mid = one_step.mid();
    let a_mid_i = IntervalMatrix::from_real(&a_mid);
    let spread = one_step.sub(&a_mid_i)?;

    let base_prod = a_mid_i.mul_real(&g.base)?;
    let base = base_prod.mid();
    let prev_err = IntervalMatrix::real_mul(&g.q, &g.r)?;
    let err = base_prod
        .sub(&IntervalMatrix::from_real(&base))?
        .add(&spread.mul_real(&g.base)?)?
        .add(&spread.mat_mat(&prev_err)?)?;

    let q = (&a_mid * &g.q).qr().q();
    let q_inv = IntervalMatrix::inverse_enclosure(&q, &q.transpose())
        .ok_or(IntegratorError::NonFinite("orthogonal factor inverse"))?;
    let carried = q_inv.mul_real(&a_mid)?.mul_real(&g.q)?.mat_mat(&g.r)?;
    let r = carried.add(&q_inv.mat_mat(&err)?)?;
    let factored = IntervalMatrix::from_real(&base).add(&IntervalMatrix::real_mul(&q, &r)?)?;
    let naive = one_step.mat_mat(&g.total)?;
    let total = match intersect(&factored, &naive) {
        Some(t) => t,
        None => {
            log::warn!("factored and naive gradient enclosures are disjoint");
            factored
        }
    };
    if !total.is_finite() {
        return Err(IntegratorError::NonFinite("gradient enclosure"));
    }

    let mid_one_step = point_variational(sys, &x.mid(), h, order);
    let mut mid_total = &mid_one_step * &g.mid_total;
    for i in 0..mid_total.nrows() {
        for k in 0..mid_total.ncols() {
            let t = total.get(i, k);
            mid_total[(i, k)] = mid_total[(i, k)].clamp(t.lo(), t.hi());
        }
    }
    Ok(GradientEnclosure {
        base,
        q,
        r,
        total,
        mid_total,
        one_step,
        mid_one_step,
    })
}

fn intersect(a: &IntervalMatrix, b: &IntervalMatrix) -> Option<IntervalMatrix> {
    let mut out = a.clone();
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            out.set(i, k, a.get(i, k).intersect(&b.get(i, k))?);
        }
    }
    Some(out)
}
