use nalgebra::DMatrix;

use super::{CoordFrame, MetricError};

/// Volume of the Euclidean unit ball in `n` dimensions.
pub fn unit_ball_volume(n: usize) -> f64 {
    let mut v = [1.0, 2.0];
    for k in 2..=n {
        v[k % 2] *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v[n % 2]
}

/// Volume of `{x : ‖A(x − c)‖₂ ≤ δ}`, i.e. `C(n) δⁿ / |det A|`.
///
/// With `exclude = Some(k)` the ellipsoid is projected onto the remaining
/// coordinates first: its shadow has shape matrix `P` = the `(k, k)` minor of
/// `A⁻¹A⁻ᵀ`, and volume `C(n−1) δⁿ⁻¹ sqrt(det P)`.
pub fn ellipsoid_volume(frame: &CoordFrame, delta: f64, exclude: Option<usize>) -> Result<f64, MetricError> {
    assert!(delta >= 0.0, "negative radius");
    let n = frame.dim();
    match exclude {
        None => {
            let det = frame.a().determinant().abs();
            if !(det > 0.0 && det.is_finite()) {
                return Err(MetricError::Degenerate { cond: f64::INFINITY });
            }
            Ok(unit_ball_volume(n) * delta.powi(n as i32) / det)
        }
        Some(k) => {
            assert!(k < n, "excluded index out of range");
            let inv = frame.a_inv().mid();
            let p = &inv * inv.transpose();
            let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
            let m = keep.len();
            let minor = DMatrix::from_fn(m, m, |i, j| p[(keep[i], keep[j])]);
            let det = minor.determinant();
            if !(det > 0.0 && det.is_finite()) {
                return Err(MetricError::Degenerate { cond: f64::INFINITY });
            }
            Ok(unit_ball_volume(m) * delta.powi(m as i32) * det.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * PI).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn unit_disk_and_sphere() {
        assert!((ellipsoid_volume(&CoordFrame::identity(2), 1.0, None).unwrap() - PI).abs() < 1e-15);
        let v = ellipsoid_volume(&CoordFrame::identity(3), 2.0, None).unwrap();
        assert!((v - 33.510321638291124).abs() < 1e-12);
    }

    #[test]
    fn axis_scaling() {
        let f = CoordFrame::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]), None).unwrap();
        assert!((ellipsoid_volume(&f, 1.0, None).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn projection_drops_coordinate() {
        let f = CoordFrame::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 5.0]), None).unwrap();
        let v = ellipsoid_volume(&f, 1.0, Some(2)).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-15);
    }
}
