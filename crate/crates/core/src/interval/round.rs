//! Directed rounding without touching the floating-point environment.
//!
//! Every primitive computes the round-to-nearest result and an exact error
//! term (TwoSum / FMA residual). The result is nudged one representable
//! value in the requested direction only when the residual shows that the
//! rounded value lies on the wrong side of the exact one.

/// Below this magnitude FMA residuals may be flushed by underflow, so
/// exactness cannot be proven and both directions are nudged.
const TINY: f64 = 1.0e-290;

/// Number of ulps added on each side of a libm transcendental result.
pub const TRANSCENDENTAL_ULPS: u32 = 4;

#[inline]
pub fn down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
pub fn up(x: f64) -> f64 {
    x.next_up()
}

pub fn down_by(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_down();
    }
    x
}

pub fn up_by(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_up();
    }
    x
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn finish_lo(v: f64, err: f64, exact_inputs: bool) -> f64 {
    if v.is_nan() {
        return f64::NEG_INFINITY;
    }
    if !v.is_finite() {
        // overflow of finite operands: the exact value is finite
        return if v > 0.0 && exact_inputs { f64::MAX } else { v };
    }
    if err < 0.0 {
        down(v)
    } else {
        v
    }
}

#[inline]
fn finish_hi(v: f64, err: f64, exact_inputs: bool) -> f64 {
    if v.is_nan() {
        return f64::INFINITY;
    }
    if !v.is_finite() {
        return if v < 0.0 && exact_inputs { f64::MIN } else { v };
    }
    if err > 0.0 {
        up(v)
    } else {
        v
    }
}

pub fn add_lo(a: f64, b: f64) -> f64 {
    let s = a + b;
    let finite = a.is_finite() && b.is_finite();
    let err = if s.is_finite() { two_sum_err(a, b, s) } else { 0.0 };
    finish_lo(s, err, finite)
}

pub fn add_hi(a: f64, b: f64) -> f64 {
    let s = a + b;
    let finite = a.is_finite() && b.is_finite();
    let err = if s.is_finite() { two_sum_err(a, b, s) } else { 0.0 };
    finish_hi(s, err, finite)
}

pub fn sub_lo(a: f64, b: f64) -> f64 {
    add_lo(a, -b)
}

pub fn sub_hi(a: f64, b: f64) -> f64 {
    add_hi(a, -b)
}

/// Product with `0 * inf` treated as zero (endpoint convention).
pub fn mul_lo(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_finite() && p.abs() < TINY {
        return down(p);
    }
    let err = if p.is_finite() { a.mul_add(b, -p) } else { 0.0 };
    finish_lo(p, err, a.is_finite() && b.is_finite())
}

pub fn mul_hi(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_finite() && p.abs() < TINY {
        return up(p);
    }
    let err = if p.is_finite() { a.mul_add(b, -p) } else { 0.0 };
    finish_hi(p, err, a.is_finite() && b.is_finite())
}

/// `a / b` rounded down; the caller guarantees `b != 0`.
pub fn div_lo(a: f64, b: f64) -> f64 {
    let q = a / b;
    if a == 0.0 && b != 0.0 && !b.is_nan() {
        return 0.0;
    }
    if q == 0.0 && a != 0.0 {
        return if (a > 0.0) == (b > 0.0) { 0.0 } else { -f64::MIN_POSITIVE };
    }
    if q.is_finite() && q.abs() < TINY || (a.abs() < TINY && a != 0.0) {
        return down(q);
    }
    let err = if q.is_finite() && b.is_finite() {
        // a - q*b has the sign of (a/b - q) times sign(b)
        let r = (-q).mul_add(b, a);
        if b > 0.0 {
            r
        } else {
            -r
        }
    } else {
        0.0
    };
    finish_lo(q, err, a.is_finite() && b.is_finite())
}

pub fn div_hi(a: f64, b: f64) -> f64 {
    let q = a / b;
    if a == 0.0 && b != 0.0 && !b.is_nan() {
        return 0.0;
    }
    if q == 0.0 && a != 0.0 {
        return if (a > 0.0) == (b > 0.0) { f64::MIN_POSITIVE } else { 0.0 };
    }
    if q.is_finite() && q.abs() < TINY || (a.abs() < TINY && a != 0.0) {
        return up(q);
    }
    let err = if q.is_finite() && b.is_finite() {
        let r = (-q).mul_add(b, a);
        if b > 0.0 {
            r
        } else {
            -r
        }
    } else {
        0.0
    };
    finish_hi(q, err, a.is_finite() && b.is_finite())
}

/// Square root of a non-negative value rounded down.
pub fn sqrt_lo(a: f64) -> f64 {
    let s = a.sqrt();
    if s == 0.0 {
        return 0.0;
    }
    if a < TINY || !s.is_finite() {
        return down(s).max(0.0);
    }
    let r = (-s).mul_add(s, a);
    if r < 0.0 {
        down(s)
    } else {
        s
    }
}

pub fn sqrt_hi(a: f64) -> f64 {
    let s = a.sqrt();
    if a == 0.0 {
        return 0.0;
    }
    if a < TINY || !s.is_finite() {
        return up(s);
    }
    let r = (-s).mul_add(s, a);
    if r > 0.0 {
        up(s)
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_are_not_widened() {
        assert_eq!(add_lo(1.0, 2.0), 3.0);
        assert_eq!(add_hi(1.0, 2.0), 3.0);
        assert_eq!(mul_lo(1.5, 4.0), 6.0);
        assert_eq!(mul_hi(1.5, 4.0), 6.0);
        assert_eq!(div_lo(1.0, 4.0), 0.25);
        assert_eq!(div_hi(1.0, 4.0), 0.25);
        assert_eq!(sqrt_lo(9.0), 3.0);
        assert_eq!(sqrt_hi(9.0), 3.0);
    }

    #[test]
    fn inexact_operations_bracket() {
        let lo = add_lo(0.1, 0.2);
        let hi = add_hi(0.1, 0.2);
        assert!(lo < hi);
        assert_eq!(hi, lo.next_up());
        let lo = div_lo(1.0, 3.0);
        let hi = div_hi(1.0, 3.0);
        assert!(lo < hi && hi == lo.next_up());
        assert!(sqrt_lo(2.0) < sqrt_hi(2.0));
        assert!(sqrt_lo(2.0) * sqrt_lo(2.0) <= 2.0);
    }

    #[test]
    fn negative_divisor() {
        let lo = div_lo(1.0, -3.0);
        let hi = div_hi(1.0, -3.0);
        assert!(lo < hi);
        assert!(lo <= -1.0 / 3.0 && -1.0 / 3.0 <= hi);
    }
}
