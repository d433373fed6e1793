//! ODE models: parsing, symbolic Jacobians and Lie derivatives, real and
//! interval evaluation, and the built-in benchmark library.

pub mod benchmarks;
pub mod diff;
pub mod expr;
mod init;
pub mod neural;
pub mod parse;
pub mod tape;

use std::sync::OnceLock;

use thiserror::Error;

pub use benchmarks::{builtin_benchmarks, find_benchmark, Benchmark, ReferenceVolume};
pub use diff::differentiate;
pub use expr::{Expr, ExprRef};
pub use init::{parse_init, InitFile, InitialSet, RADIUS_FLOOR};
pub use parse::parse_expr;
pub use tape::{EvalError, Tape};

use crate::interval::{Interval, IntervalBox, IntervalMatrix};

/// Highest Lie-derivative order kept (RK order 4 needs the fifth).
pub const MAX_LIE_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: variable x{var} has no equation")]
    Undeclared { line: usize, col: usize, var: usize },
    #[error("line {line}: duplicate equation for x{var}")]
    Duplicate { line: usize, var: usize },
    #[error("line {line}: missing equation for x{var} (equations must be numbered 1..n)")]
    MissingEquation { var: usize, line: usize },
    #[error("{line}:{col}: exponent must be an integer literal")]
    NonIntegerExponent { line: usize, col: usize },
    #[error("line {line}: time variable: {msg}")]
    TimeVariable { line: usize, msg: String },
    #[error("model contains no equations")]
    Empty,
    #[error("line {line}: {msg}")]
    Init { line: usize, msg: String },
    #[error("invalid initial set: {0}")]
    InitialSet(String),
    #[error("weights: {0}")]
    Weights(String),
}

#[derive(Clone, Debug)]
struct LieLevel {
    exprs: Vec<ExprRef>,
    tape: Tape,
}

/// An autonomous ODE system `x' = f(x)` of dimension `n`.
///
/// The Jacobian and Lie derivatives are derived lazily, once, and cached;
/// the system is immutable otherwise and can be shared between threads.
#[derive(Debug)]
pub struct OdeSystem {
    name: String,
    rhs: Vec<ExprRef>,
    time_index: Option<usize>,
    rhs_tape: Tape,
    jac: OnceLock<(Vec<Vec<ExprRef>>, Tape)>,
    lie: [OnceLock<LieLevel>; MAX_LIE_ORDER],
    lie_jac: [OnceLock<Tape>; MAX_LIE_ORDER],
}

impl Clone for OdeSystem {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            rhs: self.rhs.clone(),
            time_index: self.time_index,
            rhs_tape: self.rhs_tape.clone(),
            jac: self.jac.clone(),
            lie: self.lie.clone(),
            lie_jac: self.lie_jac.clone(),
        }
    }
}

impl OdeSystem {
    /// Builds a system from right-hand sides; panics if a variable index is
    /// out of range (use [`parse_model`] for untrusted input).
    pub fn new(name: impl Into<String>, rhs: Vec<ExprRef>, time_index: Option<usize>) -> Self {
        let n = rhs.len();
        assert!(n > 0, "empty system");
        for r in &rhs {
            if let Some(k) = r.max_var() {
                assert!(k < n, "x{} out of range for a {n}-dimensional system", k + 1);
            }
        }
        if let Some(t) = time_index {
            assert!(t < n && expr::is_const(&rhs[t], 1.0), "time variable must satisfy x' = 1");
        }
        let rhs_tape = Tape::compile(&rhs);
        Self {
            name: name.into(),
            rhs,
            time_index,
            rhs_tape,
            jac: OnceLock::new(),
            lie: Default::default(),
            lie_jac: Default::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn rhs(&self) -> &[ExprRef] {
        &self.rhs
    }

    pub fn time_index(&self) -> Option<usize> {
        self.time_index
    }

    fn jac_level(&self) -> &(Vec<Vec<ExprRef>>, Tape) {
        self.jac.get_or_init(|| {
            let j = diff::jacobian(&self.rhs);
            let flat: Vec<ExprRef> = j.iter().flatten().cloned().collect();
            let tape = Tape::compile(&flat);
            (j, tape)
        })
    }

    /// `J[j][k] = ∂ f_j / ∂ x_k`.
    pub fn jacobian(&self) -> &[Vec<ExprRef>] {
        &self.jac_level().0
    }

    fn lie_level(&self, order: usize) -> &LieLevel {
        assert!((1..=MAX_LIE_ORDER).contains(&order), "Lie order {order} unsupported");
        self.lie[order - 1].get_or_init(|| {
            let exprs = if order == 1 {
                self.rhs.clone()
            } else {
                diff::lie_step(&self.lie_level(order - 1).exprs, &self.rhs)
            };
            let tape = Tape::compile(&exprs);
            LieLevel { exprs, tape }
        })
    }

    /// `L^k`: the k-th time derivative of the flow expressed in the state,
    /// `L^1 = f`, `L^{k+1} = (∂ L^k / ∂x) f`.
    pub fn lie_derivative(&self, order: usize) -> &[ExprRef] {
        &self.lie_level(order).exprs
    }

    pub fn eval_rhs(&self, x: &[f64]) -> Vec<f64> {
        self.rhs_tape.eval_f64_vec(x)
    }

    /// Allocation-free right-hand side evaluation for hot loops.
    pub fn eval_rhs_into(&self, x: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        self.rhs_tape.eval_f64(x, scratch, out);
    }

    pub fn eval_rhs_interval(&self, x: &IntervalBox) -> Result<IntervalBox, EvalError> {
        Ok(IntervalBox::new(self.rhs_tape.eval_interval(x.as_slice())?))
    }

    pub fn eval_jacobian(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let v = self.jac_level().1.eval_f64_vec(x);
        nalgebra::DMatrix::from_row_slice(n, n, &v)
    }

    pub fn eval_jacobian_interval(&self, x: &IntervalBox) -> Result<IntervalMatrix, EvalError> {
        let n = self.dim();
        let v = self.jac_level().1.eval_interval(x.as_slice())?;
        Ok(IntervalMatrix::from_fn(n, n, |i, j| v[i * n + j]))
    }

    pub fn eval_lie_interval(&self, order: usize, x: &IntervalBox) -> Result<IntervalBox, EvalError> {
        Ok(IntervalBox::new(self.lie_level(order).tape.eval_interval(x.as_slice())?))
    }

    fn lie_jacobian_tape(&self, order: usize) -> &Tape {
        if order == 1 {
            return &self.jac_level().1;
        }
        self.lie_jac[order - 1].get_or_init(|| {
            let j = diff::jacobian(&self.lie_level(order).exprs);
            Tape::compile(&j.into_iter().flatten().collect::<Vec<_>>())
        })
    }

    /// Interval enclosure of `∂L^k/∂x` over `x`.
    pub fn eval_lie_jacobian_interval(&self, order: usize, x: &IntervalBox) -> Result<IntervalMatrix, EvalError> {
        let n = self.dim();
        let v = self.lie_jacobian_tape(order).eval_interval(x.as_slice())?;
        Ok(IntervalMatrix::from_fn(n, n, |i, j| v[i * n + j]))
    }

    pub fn eval_lie(&self, order: usize, x: &[f64]) -> Vec<f64> {
        self.lie_level(order).tape.eval_f64_vec(x)
    }

    /// Renders the system back into model-file syntax.
    pub fn to_model_text(&self) -> String {
        let mut s = String::new();
        for (k, r) in self.rhs.iter().enumerate() {
            s.push_str(&format!("x{}' = {}\n", k + 1, r));
        }
        if let Some(t) = self.time_index {
            s.push_str(&format!("time x{}\n", t + 1));
        }
        s
    }
}

/// Parses model-file text into an [`OdeSystem`].
pub fn parse_model(text: &str) -> Result<OdeSystem, ModelError> {
    let parsed = parse::parse_model_text(text)?;
    Ok(OdeSystem::new("model", parsed.rhs, parsed.time_index))
}

/// Interval evaluation of a single expression; encloses its range over `x`.
pub fn eval_interval(e: &Expr, x: &IntervalBox) -> Result<Interval, EvalError> {
    use expr::Expr as E;
    let wrap = |e: &Expr, source| {
        let mut location = e.to_string();
        if location.len() > 160 {
            location.truncate(160);
            location.push_str("...");
        }
        EvalError { location, source }
    };
    match e {
        E::Const(c) => Ok(c.enclosure),
        E::Var(k) => Ok(x[*k]),
        E::Unary(op, a) => op.apply_interval(eval_interval(a, x)?).map_err(|s| wrap(e, s)),
        E::Binary(op, a, b) => op
            .apply_interval(eval_interval(a, x)?, eval_interval(b, x)?)
            .map_err(|s| wrap(e, s)),
        E::PowI(a, n) => eval_interval(a, x)?.powi(*n).map_err(|s| wrap(e, s)),
    }
}

/// Floating-point evaluation of a single expression.
pub fn eval_real(e: &Expr, x: &[f64]) -> f64 {
    e.eval_real(x)
}
