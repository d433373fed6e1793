use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::round::{self, TRANSCENDENTAL_ULPS};
use super::IntervalError;

/// A closed interval `[lo, hi]` of reals with `lo <= hi`.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Default for Interval {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).unwrap_or_else(|| panic!("invalid interval [{lo}, {hi}]"))
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        if lo <= hi {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// `[c - r, c + r]` with outward rounding.
    pub fn centered(c: f64, r: f64) -> Self {
        let r = r.abs();
        Self::new(round::sub_lo(c, r), round::add_hi(c, r))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Upward-rounded width.
    pub fn width(&self) -> f64 {
        round::sub_hi(self.hi, self.lo)
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
            return 0.0;
        }
        if self.lo == f64::NEG_INFINITY {
            return f64::MIN;
        }
        if self.hi == f64::INFINITY {
            return f64::MAX;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Radius about [`Interval::mid`], rounded up so that `[mid - rad, mid + rad]` covers `self`.
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        round::sub_hi(m, self.lo).max(round::sub_hi(self.hi, m))
    }

    /// Largest absolute value of a member.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value of a member.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> Interval {
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Widen by `factor` about the midpoint and add `abs` on both sides.
    pub fn inflate(&self, factor: f64, abs: f64) -> Interval {
        let m = self.mid();
        let r = round::add_hi(round::mul_hi(self.rad(), factor), abs);
        Interval::new(round::sub_lo(m, r), round::add_hi(m, r)).hull(self)
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZero);
        }
        let cands_lo = [
            round::div_lo(self.lo, rhs.lo),
            round::div_lo(self.lo, rhs.hi),
            round::div_lo(self.hi, rhs.lo),
            round::div_lo(self.hi, rhs.hi),
        ];
        let cands_hi = [
            round::div_hi(self.lo, rhs.lo),
            round::div_hi(self.lo, rhs.hi),
            round::div_hi(self.hi, rhs.lo),
            round::div_hi(self.hi, rhs.hi),
        ];
        Ok(Interval {
            lo: min4(cands_lo),
            hi: max4(cands_hi),
        })
    }

    pub fn recip(self) -> Result<Interval, IntervalError> {
        Interval::ONE.checked_div(self)
    }

    pub fn sqr(self) -> Interval {
        self.powi_nonneg(2)
    }

    fn point_pow(x: f64, n: u32) -> Interval {
        let mut acc = Interval::ONE;
        let base = Interval::point(x);
        for _ in 0..n {
            acc = acc * base;
        }
        acc
    }

    fn powi_nonneg(self, n: u32) -> Interval {
        if n == 0 {
            return Interval::ONE;
        }
        let plo = Interval::point_pow(self.lo, n);
        let phi = Interval::point_pow(self.hi, n);
        if n % 2 == 1 || self.lo >= 0.0 {
            Interval::new(plo.lo, phi.hi)
        } else if self.hi <= 0.0 {
            Interval::new(phi.lo, plo.hi)
        } else {
            Interval::new(0.0, plo.hi.max(phi.hi))
        }
    }

    pub fn powi(self, n: i32) -> Result<Interval, IntervalError> {
        if n >= 0 {
            Ok(self.powi_nonneg(n as u32))
        } else {
            self.powi_nonneg(n.unsigned_abs()).recip()
        }
    }

    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain {
                op: "sqrt",
                arg: self,
            });
        }
        Ok(Interval {
            lo: round::sqrt_lo(self.lo),
            hi: round::sqrt_hi(self.hi),
        })
    }

    pub fn exp(self) -> Interval {
        let lo = if self.lo == f64::NEG_INFINITY {
            0.0
        } else {
            round::down_by(self.lo.exp(), TRANSCENDENTAL_ULPS).max(0.0)
        };
        let hi = round::up_by(self.hi.exp(), TRANSCENDENTAL_ULPS);
        Interval { lo, hi }
    }

    pub fn ln(self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::Domain { op: "ln", arg: self });
        }
        Ok(Interval {
            lo: round::down_by(self.lo.ln(), TRANSCENDENTAL_ULPS),
            hi: round::up_by(self.hi.ln(), TRANSCENDENTAL_ULPS),
        })
    }

    pub fn tanh(self) -> Interval {
        let lo = round::down_by(self.lo.tanh(), TRANSCENDENTAL_ULPS).max(-1.0);
        let hi = round::up_by(self.hi.tanh(), TRANSCENDENTAL_ULPS).min(1.0);
        Interval { lo, hi }
    }

    pub fn sin(self) -> Interval {
        self.periodic(f64::sin, FRAC_PI_2, -FRAC_PI_2)
    }

    pub fn cos(self) -> Interval {
        self.periodic(f64::cos, 0.0, PI)
    }

    /// Enclosure of a `2π`-periodic function with range `[-1, 1]` whose
    /// maxima sit at `max_at + 2kπ` and minima at `min_at + 2kπ`, monotone
    /// in between.
    fn periodic(self, f: fn(f64) -> f64, max_at: f64, min_at: f64) -> Interval {
        const FULL: Interval = Interval { lo: -1.0, hi: 1.0 };
        if !self.is_finite() || self.width() >= 2.0 * PI || self.mag() > 1.0e8 {
            return FULL;
        }
        let (a, b) = (f(self.lo), f(self.hi));
        let mut lo = round::down_by(a.min(b), TRANSCENDENTAL_ULPS);
        let mut hi = round::up_by(a.max(b), TRANSCENDENTAL_ULPS);
        if self.hits_critical(max_at) {
            hi = 1.0;
        }
        if self.hits_critical(min_at) {
            lo = -1.0;
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }

    /// Whether some `offset + 2kπ` may lie in `self`; errs on the side of `true`.
    fn hits_critical(&self, offset: f64) -> bool {
        let period = 2.0 * PI;
        let kmin = ((self.lo - offset) / period).floor() - 1.0;
        let kmax = ((self.hi - offset) / period).ceil() + 1.0;
        let mut k = kmin;
        while k <= kmax {
            let p = offset + k * period;
            let tol = 8.0 * f64::EPSILON * (p.abs() + 1.0);
            if p >= self.lo - tol && p <= self.hi + tol {
                return true;
            }
            k += 1.0;
        }
        false
    }

    pub fn tan(self) -> Result<Interval, IntervalError> {
        if !self.is_finite() || self.width() >= PI {
            return Err(IntervalError::Domain { op: "tan", arg: self });
        }
        // poles at π/2 + kπ: check both parities of the 2π lattice
        if self.hits_critical(FRAC_PI_2) || self.hits_critical(-FRAC_PI_2) {
            return Err(IntervalError::Domain { op: "tan", arg: self });
        }
        Ok(Interval {
            lo: round::down_by(self.lo.tan(), TRANSCENDENTAL_ULPS),
            hi: round::up_by(self.hi.tan(), TRANSCENDENTAL_ULPS),
        })
    }
}

fn min4(v: [f64; 4]) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn max4(v: [f64; 4]) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::add_lo(self.lo, rhs.lo),
            hi: round::add_hi(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::sub_lo(self.lo, rhs.hi),
            hi: round::sub_hi(self.hi, rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        if a >= 0.0 && c >= 0.0 {
            return Interval {
                lo: round::mul_lo(a, c),
                hi: round::mul_hi(b, d),
            };
        }
        let lo = min4([
            round::mul_lo(a, c),
            round::mul_lo(a, d),
            round::mul_lo(b, c),
            round::mul_lo(b, d),
        ]);
        let hi = max4([
            round::mul_hi(a, c),
            round::mul_hi(a, d),
            round::mul_hi(b, c),
            round::mul_hi(b, d),
        ]);
        Interval { lo, hi }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(-1.0, 2.0) * iv(3.0, 4.0), iv(-4.0, 8.0));
        assert_eq!(iv(1.0, 2.0) - iv(3.0, 4.0), iv(-3.0, -1.0));
        assert_eq!(-iv(1.0, 2.0), iv(-2.0, -1.0));
        assert_eq!(iv(1.0, 2.0).checked_div(iv(4.0, 8.0)).unwrap(), iv(0.125, 0.5));
    }

    #[test]
    fn division_by_zero_interval() {
        assert!(matches!(
            iv(1.0, 2.0).checked_div(iv(-1.0, 1.0)),
            Err(IntervalError::DivisionByZero)
        ));
        assert!(iv(1.0, 2.0).checked_div(iv(0.0, 1.0)).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(iv(-1.0, 1.0).ln().is_err());
        assert!(iv(-1.0, 1.0).sqrt().is_err());
        assert!(iv(1.0, 2.0).tan().is_err());
        assert!(iv(0.0, 1.0).tan().is_ok());
    }

    #[test]
    fn sin_over_quarter_period() {
        let s = iv(0.0, FRAC_PI_2).sin();
        assert!(s.hi() >= 1.0 && s.lo() <= 0.0);
        assert!(s.lo() > -1e-12);
    }

    #[test]
    fn sin_cos_with_interior_extrema() {
        assert_eq!(iv(1.0, 2.0).sin().hi(), 1.0);
        assert_eq!(iv(3.0, 3.5).cos().lo(), -1.0);
        assert_eq!(iv(-0.5, 0.5).cos().hi(), 1.0);
        let s = iv(0.1, 0.2).sin();
        assert!(s.contains(0.1f64.sin()) && s.contains(0.2f64.sin()) && s.contains(0.15f64.sin()));
        assert_eq!(iv(0.0, 7.0).sin(), iv(-1.0, 1.0));
    }

    #[test]
    fn monotone_transcendentals_contain_endpoints() {
        let x = iv(-0.3, 0.7);
        assert!(x.exp().contains((-0.3f64).exp()) && x.exp().contains(0.7f64.exp()));
        assert!(x.tanh().contains((-0.3f64).tanh()));
        let y = iv(0.5, 3.0);
        assert!(y.ln().unwrap().contains(0.5f64.ln()));
        assert!(y.sqrt().unwrap().contains(3.0f64.sqrt()));
    }

    #[test]
    fn mid_and_rad() {
        assert_eq!(iv(1.0, 3.0).mid(), 2.0);
        assert_eq!(iv(1.0, 3.0).rad(), 1.0);
        assert_eq!(Interval::point(0.7).mid(), 0.7);
        assert_eq!(Interval::point(0.7).rad(), 0.0);
    }

    #[test]
    fn intersect_and_hull() {
        assert_eq!(iv(0.0, 2.0).intersect(&iv(1.0, 3.0)), Some(iv(1.0, 2.0)));
        assert_eq!(iv(0.0, 1.0).intersect(&iv(2.0, 3.0)), None);
        assert_eq!(iv(0.0, 1.0).hull(&iv(2.0, 3.0)), iv(0.0, 3.0));
    }

    #[test]
    fn even_and_odd_powers() {
        assert_eq!(iv(-1.0, 2.0).powi(2).unwrap(), iv(0.0, 4.0));
        assert_eq!(iv(-1.0, 2.0).powi(3).unwrap(), iv(-1.0, 8.0));
        assert_eq!(iv(-3.0, -2.0).powi(2).unwrap(), iv(4.0, 9.0));
        assert_eq!(iv(2.0, 4.0).powi(-1).unwrap(), iv(0.25, 0.5));
        assert!(iv(-1.0, 1.0).powi(-2).is_err());
    }
}
