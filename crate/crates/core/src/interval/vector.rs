use std::ops::{Index, IndexMut};

use super::{round, Interval, IntervalError};

/// A box: the Cartesian product of `n >= 1` intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBox(Vec<Interval>);

impl IntervalBox {
    /// Panics on an empty component list.
    pub fn new(components: Vec<Interval>) -> Self {
        assert!(!components.is_empty(), "a box needs at least one component");
        Self(components)
    }

    pub fn from_point(x: &[f64]) -> Self {
        Self::new(x.iter().copied().map(Interval::point).collect())
    }

    /// `c_j ± r_j` with outward rounding.
    pub fn centered(c: &[f64], r: &[f64]) -> Self {
        assert_eq!(c.len(), r.len());
        Self::new(c.iter().zip(r).map(|(&c, &r)| Interval::centered(c, r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Interval> {
        self.0
    }

    pub fn mid(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid).collect()
    }

    pub fn rad(&self) -> Vec<f64> {
        self.0.iter().map(Interval::rad).collect()
    }

    pub fn lo(&self) -> Vec<f64> {
        self.0.iter().map(Interval::lo).collect()
    }

    pub fn hi(&self) -> Vec<f64> {
        self.0.iter().map(Interval::hi).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(Interval::is_finite)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x).all(|(iv, &v)| iv.contains(v))
    }

    pub fn is_subset_of(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset_of(b))
    }

    /// Componentwise intersection; `None` when any component is disjoint.
    pub fn intersect(&self, other: &IntervalBox) -> Option<IntervalBox> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()
            .map(IntervalBox)
    }

    pub fn hull(&self, other: &IntervalBox) -> IntervalBox {
        assert_eq!(self.dim(), other.dim());
        IntervalBox(self.0.iter().zip(&other.0).map(|(a, b)| a.hull(b)).collect())
    }

    pub fn inflate(&self, factor: f64, abs: f64) -> IntervalBox {
        IntervalBox(self.0.iter().map(|c| c.inflate(factor, abs)).collect())
    }

    /// Upward-rounded product of component widths, skipping `exclude`.
    pub fn volume(&self, exclude: Option<usize>) -> f64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != exclude)
            .fold(1.0, |acc, (_, c)| round::mul_hi(acc, c.width()))
    }

    pub fn add(&self, other: &IntervalBox) -> Result<IntervalBox, IntervalError> {
        self.check_dim(other.dim())?;
        Ok(IntervalBox(self.0.iter().zip(&other.0).map(|(a, b)| *a + *b).collect()))
    }

    pub fn sub(&self, other: &IntervalBox) -> Result<IntervalBox, IntervalError> {
        self.check_dim(other.dim())?;
        Ok(IntervalBox(self.0.iter().zip(&other.0).map(|(a, b)| *a - *b).collect()))
    }

    pub fn scale(&self, s: Interval) -> IntervalBox {
        IntervalBox(self.0.iter().map(|c| *c * s).collect())
    }

    /// Upper bound of the Euclidean norm over all members.
    pub fn norm2_hi(&self) -> f64 {
        let sq = self.0.iter().fold(0.0, |acc, c| {
            let m = c.mag();
            round::add_hi(acc, round::mul_hi(m, m))
        });
        round::sqrt_hi(sq)
    }

    fn check_dim(&self, other: usize) -> Result<(), IntervalError> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(IntervalError::Shape {
                expected: (self.dim(), 1),
                found: (other, 1),
            })
        }
    }
}

impl Index<usize> for IntervalBox {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntervalBox {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

impl FromIterator<Interval> for IntervalBox {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalBox::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a IntervalBox {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
