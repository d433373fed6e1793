#[cfg(test)]
use nalgebra::DMatrix;

use super::{CoordFrame, MetricError};
use crate::interval::{round, Interval, IntervalMatrix};

/// Gershgorin bound `max_i (hi(H_ii) + Σ_{j≠i} mag(H_ij))`.
pub fn gershgorin_bound(h: &IntervalMatrix) -> f64 {
    (0..h.nrows())
        .map(|i| {
            h.row(i).iter().enumerate().fold(h.get(i, i).hi(), |acc, (j, v)| {
                if j == i {
                    acc
                } else {
                    round::add_hi(acc, v.mag())
                }
            })
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `‖E‖₂ ≤ sqrt(‖E‖₁ ‖E‖∞)`.
fn norm2_hi(e: &IntervalMatrix) -> f64 {
    round::sqrt_hi(round::mul_hi(e.norm_one_hi(), e.norm_inf_hi()))
}

/// Bound from a floating-point eigendecomposition `mid(H) ≈ V D Vᵀ`.
///
/// `λ_max(V D Vᵀ) ≤ max(d_max, 0) ‖V‖₂²` with `‖V‖₂² ≤ 1 + ‖VᵀV − I‖₂`;
/// the decomposition residual and `ρ(rad H) ≤ ‖rad H‖∞` are added on top.
fn decomposition_bound(h: &IntervalMatrix) -> Option<f64> {
    let n = h.nrows();
    let mid = h.mid();
    let sym = (&mid + mid.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = &eig.eigenvalues;
    let dmax = d.max();
    if !dmax.is_finite() {
        return None;
    }
    let vi = IntervalMatrix::from_real(v);
    let di = IntervalMatrix::from_fn(n, n, |i, j| if i == j { Interval::point(d[i]) } else { Interval::ZERO });
    let vdvt = vi.mat_mat(&di).ok()?.mat_mat(&vi.transpose()).ok()?;
    let residual = norm2_hi(&IntervalMatrix::from_real(&mid).sub(&vdvt).ok()?);
    let gram = vi.transpose().mat_mat(&vi).ok()?.sub(&IntervalMatrix::identity(n)).ok()?;
    let v_norm_sq = round::add_hi(1.0, norm2_hi(&gram));
    let rad = IntervalMatrix::from_real(&h.rad()).norm_inf_hi();
    let bound = round::add_hi(
        round::add_hi(round::mul_hi(dmax.max(0.0), v_norm_sq), residual),
        rad,
    );
    bound.is_finite().then_some(bound)
}

/// Upper bound on `λ_max` of every symmetric member of `h`: the smaller of
/// the Gershgorin and the eigendecomposition bounds.
pub fn lambda_max_bound(h: &IntervalMatrix) -> Result<f64, MetricError> {
    if !h.is_square() || !h.is_finite() {
        return Err(MetricError::NonFinite("symmetric matrix"));
    }
    let g = gershgorin_bound(h);
    Ok(match decomposition_bound(h) {
        Some(d) => d.min(g),
        None => g,
    })
}

/// `SᵀS` with the lower triangle mirrored from the upper one.
fn gram(s: &IntervalMatrix) -> IntervalMatrix {
    let n = s.ncols();
    let mut h = IntervalMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: Interval = (0..s.nrows()).map(|k| s.get(k, i) * s.get(k, j)).sum();
            h.set(i, j, v);
            h.set(j, i, v);
        }
    }
    h
}

/// Upper bound on `max_{S∈[S]} σ_max(S)`.
///
/// The smaller of `sqrt(λ̄(SᵀS))` and `sqrt(λ̄(mid Sᵀ mid S)) + ‖rad S‖₂`.
pub fn spectral_norm_bound(s: &IntervalMatrix) -> Result<f64, MetricError> {
    if !s.is_finite() {
        return Err(MetricError::NonFinite("interval matrix"));
    }
    let whole = round::sqrt_hi(lambda_max_bound(&gram(s))?.max(0.0));
    let mid = IntervalMatrix::from_real(&s.mid());
    let mid_norm = round::sqrt_hi(lambda_max_bound(&gram(&mid))?.max(0.0));
    let rad = norm2_hi(&IntervalMatrix::from_real(&s.rad()));
    Ok(whole.min(round::add_hi(mid_norm, rad)))
}

/// Rigorous upper bound on `‖A_target F A₀⁻¹‖₂` over all `F ∈ [F]`.
pub fn stretching_factor(target: &CoordFrame, f: &IntervalMatrix, a0_inv: &IntervalMatrix) -> Result<f64, MetricError> {
    let s = IntervalMatrix::real_mul(target.a(), f)?.mat_mat(a0_inv)?;
    spectral_norm_bound(&s)
}

/// Floating-point largest singular value, for tests.
#[cfg(test)]
pub(crate) fn sigma_max(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}
