use nalgebra::DMatrix;

use super::{round, Interval, IntervalBox, IntervalError};

/// Row-major matrix of intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Interval::ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Interval::ONE } else { Interval::ZERO })
    }

    /// Embeds a real matrix as a degenerate interval matrix.
    pub fn from_real(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| Interval::point(m[(i, j)]))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Interval] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(Interval) -> Interval) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    pub fn mid(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mid())
    }

    pub fn rad(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).rad())
    }

    /// Entrywise magnitudes.
    pub fn mag(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mag())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Interval::is_finite)
    }

    pub fn contains(&self, m: &DMatrix<f64>) -> bool {
        m.nrows() == self.rows
            && m.ncols() == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j).contains(m[(i, j)])))
    }

    pub fn is_subset_of(&self, other: &IntervalMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.is_subset_of(b))
    }

    pub fn hull(&self, other: &IntervalMatrix) -> Result<Self, IntervalError> {
        self.check_same(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.hull(b)).collect(),
        })
    }

    pub fn add(&self, other: &IntervalMatrix) -> Result<Self, IntervalError> {
        self.check_same(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn sub(&self, other: &IntervalMatrix) -> Result<Self, IntervalError> {
        self.check_same(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        })
    }

    pub fn scale(&self, s: Interval) -> Self {
        self.map(|x| x * s)
    }

    pub fn mat_vec(&self, v: &IntervalBox) -> Result<IntervalBox, IntervalError> {
        if v.dim() != self.cols {
            return Err(IntervalError::Shape {
                expected: (self.cols, 1),
                found: (v.dim(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect())
    }

    pub fn mat_mat(&self, other: &IntervalMatrix) -> Result<Self, IntervalError> {
        if self.cols != other.rows {
            return Err(IntervalError::Shape {
                expected: (self.cols, other.cols),
                found: (other.rows, other.cols),
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Interval::ZERO;
            for k in 0..self.cols {
                acc = acc + self.get(i, k) * other.get(k, j);
            }
            acc
        }))
    }

    /// `self * m` for a real matrix `m`.
    pub fn mul_real(&self, m: &DMatrix<f64>) -> Result<Self, IntervalError> {
        self.mat_mat(&Self::from_real(m))
    }

    /// `m * self` for a real matrix `m`.
    pub fn real_mul(m: &DMatrix<f64>, other: &IntervalMatrix) -> Result<Self, IntervalError> {
        Self::from_real(m).mat_mat(other)
    }

    /// Upper bound of the induced infinity norm (max absolute row sum).
    pub fn norm_inf_hi(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(0.0, |acc, x| round::add_hi(acc, x.mag())))
            .fold(0.0, f64::max)
    }

    /// Upper bound of the induced 1-norm (max absolute column sum).
    pub fn norm_one_hi(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(0.0, |acc, i| round::add_hi(acc, self.get(i, j).mag())))
            .fold(0.0, f64::max)
    }

    /// Rigorous enclosure of `a⁻¹` around the approximate inverse `approx`.
    ///
    /// With `E = I - approx·a` and `ρ = ‖E‖∞ < 1`, `a⁻¹ = (I - E)⁻¹ approx`, so
    /// every entry of `a⁻¹ - approx` is bounded by `ρ ‖approx‖∞ / (1 - ρ)`.
    /// Returns `None` when `ρ ≥ 1` or anything is non-finite.
    pub fn inverse_enclosure(a: &DMatrix<f64>, approx: &DMatrix<f64>) -> Option<Self> {
        let n = a.nrows();
        if a.ncols() != n || approx.shape() != (n, n) {
            return None;
        }
        let x = Self::from_real(approx);
        let e = Self::identity(n).sub(&x.mul_real(a).ok()?).ok()?;
        let rho = e.norm_inf_hi();
        if !(rho < 1.0) {
            return None;
        }
        let bound = round::mul_hi(x.norm_inf_hi(), round::div_hi(rho, round::sub_lo(1.0, rho)));
        if !bound.is_finite() {
            return None;
        }
        Some(x.map(|v| Interval::new(round::sub_lo(v.lo(), bound), round::add_hi(v.hi(), bound))))
    }

    /// Drops row and column `k` from a square matrix.
    pub fn minor(&self, k: usize) -> Self {
        let keep: Vec<usize> = (0..self.rows).filter(|&i| i != k).collect();
        Self::from_fn(keep.len(), keep.len(), |i, j| self.get(keep[i], keep[j]))
    }

    fn check_same(&self, other: &IntervalMatrix) -> Result<(), IntervalError> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(IntervalError::Shape {
                expected: (self.rows, self.cols),
                found: (other.rows, other.cols),
            })
        }
    }
}
