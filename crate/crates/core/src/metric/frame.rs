use nalgebra::DMatrix;

use super::MetricError;
use crate::interval::{round, Interval, IntervalMatrix};

/// Frames whose gradient is worse conditioned than this are rejected.
pub const MAX_CONDITION: f64 = 1e14;
const MIN_SINGULAR: f64 = 1e-30;

/// Full-rank `A` together with a rigorous enclosure of `A⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordFrame {
    a: DMatrix<f64>,
    a_inv: IntervalMatrix,
}

impl CoordFrame {
    /// Certifies the inverse of `a`; `approx_inv` may be supplied when known.
    pub fn new(a: DMatrix<f64>, approx_inv: Option<DMatrix<f64>>) -> Result<Self, MetricError> {
        if !a.is_square() || a.iter().any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite("frame matrix"));
        }
        let approx = match approx_inv {
            Some(x) => x,
            None => a.clone().lu().try_inverse().ok_or(MetricError::Degenerate { cond: f64::INFINITY })?,
        };
        let a_inv = IntervalMatrix::inverse_enclosure(&a, &approx).ok_or(MetricError::NotCertified)?;
        Ok(Self { a, a_inv })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: DMatrix::identity(n, n),
            a_inv: IntervalMatrix::identity(n),
        }
    }

    /// `A = diag(1/r_j)`, rounded down so the ellipsoid `‖A(x − c)‖ ≤ 1`
    /// covers the box-aligned ellipsoid with semi-axes `r`.
    pub fn from_radii(radii: &[f64]) -> Result<Self, MetricError> {
        let n = radii.len();
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(MetricError::NonFinite("radius"));
        }
        let diag: Vec<f64> = radii.iter().map(|&r| round::div_lo(1.0, r)).collect();
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone()));
        let a_inv = IntervalMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Interval::ONE.checked_div(Interval::point(diag[i])).expect("positive diagonal")
            } else {
                Interval::ZERO
            }
        });
        Ok(Self { a, a_inv })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn a_inv(&self) -> &IntervalMatrix {
        &self.a_inv
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Upper bounds of the 2-norms of the rows of `A⁻¹`: the half-widths of
    /// the bounding box of the unit ellipsoid.
    pub fn inverse_row_norms(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let sq = self
                    .a_inv
                    .row(i)
                    .iter()
                    .fold(0.0, |acc, v| round::add_hi(acc, round::mul_hi(v.mag(), v.mag())));
                round::sqrt_hi(sq)
            })
            .collect()
    }
}

/// Volume-optimal frame `Â = A₀ F⁻¹` for the point gradient `F`.
pub fn optimal_frame(a0: &CoordFrame, f_mid: &DMatrix<f64>) -> Result<CoordFrame, MetricError> {
    if f_mid.iter().any(|v| !v.is_finite()) {
        return Err(MetricError::NonFinite("gradient"));
    }
    let sv = f_mid.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let cond = smax / smin;
    if !(smin > MIN_SINGULAR) || !(cond <= MAX_CONDITION) {
        return Err(MetricError::Degenerate { cond });
    }
    // Âᵀ solves Fᵀ Âᵀ = A₀ᵀ
    let a = f_mid
        .transpose()
        .lu()
        .solve(&a0.a.transpose())
        .ok_or(MetricError::Degenerate { cond })?
        .transpose();
    let approx_inv = f_mid * a0.a_inv.mid();
    CoordFrame::new(a, Some(approx_inv))
}
