//! Outward-rounded interval arithmetic over scalars, boxes and matrices.
//!
//! Rounding is directed per operation (see [`round`]) instead of switching
//! the global FPU mode, so values can be shared freely across threads.
//! libm transcendentals are widened by a fixed
//! [`round::TRANSCENDENTAL_ULPS`] on each side.

mod matrix;
pub mod round;
mod scalar;
mod vector;

pub use matrix::IntervalMatrix;
pub use scalar::Interval;
pub use vector::IntervalBox;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("{op} undefined on {arg}")]
    Domain { op: &'static str, arg: Interval },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },
}
