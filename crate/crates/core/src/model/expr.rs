use std::fmt;
use std::sync::Arc;

use crate::interval::Interval;

pub type ExprRef = Arc<Expr>;

/// A numeric literal: the nearest double plus a rigorous enclosure of the
/// real value it denotes (decimal literals such as `0.3` are not exact).
#[derive(Clone, Copy, Debug)]
pub struct Constant {
    pub value: f64,
    pub enclosure: Interval,
}

impl Constant {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            enclosure: Interval::point(value),
        }
    }

    pub fn is(&self, v: f64) -> bool {
        self.enclosure.is_point() && self.value == v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Tanh,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<UnaryOp> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "tan" => UnaryOp::Tan,
            "tanh" => UnaryOp::Tanh,
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }

    pub fn apply_f64(self, x: f64) -> f64 {
        match self {
            UnaryOp::Neg => -x,
            UnaryOp::Sin => x.sin(),
            UnaryOp::Cos => x.cos(),
            UnaryOp::Tan => x.tan(),
            UnaryOp::Tanh => x.tanh(),
            UnaryOp::Exp => x.exp(),
            UnaryOp::Ln => x.ln(),
            UnaryOp::Sqrt => x.sqrt(),
        }
    }

    pub fn apply_interval(self, x: Interval) -> Result<Interval, crate::interval::IntervalError> {
        Ok(match self {
            UnaryOp::Neg => -x,
            UnaryOp::Sin => x.sin(),
            UnaryOp::Cos => x.cos(),
            UnaryOp::Tan => x.tan()?,
            UnaryOp::Tanh => x.tanh(),
            UnaryOp::Exp => x.exp(),
            UnaryOp::Ln => x.ln()?,
            UnaryOp::Sqrt => x.sqrt()?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }

    pub fn apply_f64(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
        }
    }

    pub fn apply_interval(
        self,
        a: Interval,
        b: Interval,
    ) -> Result<Interval, crate::interval::IntervalError> {
        Ok(match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a.checked_div(b)?,
        })
    }
}

/// Expression tree over the state variables `x1..xn` (stored 0-based).
#[derive(Clone, Debug)]
pub enum Expr {
    Const(Constant),
    Var(usize),
    Unary(UnaryOp, ExprRef),
    Binary(BinaryOp, ExprRef, ExprRef),
    PowI(ExprRef, i32),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Expr::Const(a), Expr::Const(b)) => a.value.to_bits() == b.value.to_bits(),
            (Expr::Var(a), Expr::Var(b)) => a == b,
            (Expr::Unary(o1, a), Expr::Unary(o2, b)) => o1 == o2 && a == b,
            (Expr::Binary(o1, a1, b1), Expr::Binary(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            (Expr::PowI(a, n), Expr::PowI(b, m)) => n == m && a == b,
            _ => false,
        }
    }
}

// Builders. Each folds constant operands and drops neutral / absorbing
// constants (x+0, x*1, x*0, x^1, x^0); nothing else is rewritten.

pub fn constant(v: f64) -> ExprRef {
    Arc::new(Expr::Const(Constant::exact(v)))
}

pub fn literal(c: Constant) -> ExprRef {
    Arc::new(Expr::Const(c))
}

pub fn var(k: usize) -> ExprRef {
    Arc::new(Expr::Var(k))
}

fn as_const(e: &Expr) -> Option<Constant> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

pub fn is_const(e: &Expr, v: f64) -> bool {
    as_const(e).is_some_and(|c| c.is(v))
}

pub fn unary(op: UnaryOp, a: ExprRef) -> ExprRef {
    if let Some(c) = as_const(&a) {
        if let Ok(enc) = op.apply_interval(c.enclosure) {
            let value = op.apply_f64(c.value);
            if value.is_finite() && enc.is_finite() {
                return literal(Constant {
                    value: value.clamp(enc.lo(), enc.hi()),
                    enclosure: enc,
                });
            }
        }
    }
    if op == UnaryOp::Neg {
        if let Expr::Unary(UnaryOp::Neg, inner) = &*a {
            return inner.clone();
        }
    }
    Arc::new(Expr::Unary(op, a))
}

pub fn neg(a: ExprRef) -> ExprRef {
    unary(UnaryOp::Neg, a)
}

pub fn binary(op: BinaryOp, a: ExprRef, b: ExprRef) -> ExprRef {
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        if let Ok(enc) = op.apply_interval(x.enclosure, y.enclosure) {
            let value = op.apply_f64(x.value, y.value);
            if value.is_finite() && enc.is_finite() {
                return literal(Constant {
                    value: value.clamp(enc.lo(), enc.hi()),
                    enclosure: enc,
                });
            }
        }
    }
    match op {
        BinaryOp::Add => {
            if is_const(&a, 0.0) {
                return b;
            }
            if is_const(&b, 0.0) {
                return a;
            }
        }
        BinaryOp::Sub => {
            if is_const(&b, 0.0) {
                return a;
            }
            if is_const(&a, 0.0) {
                return neg(b);
            }
        }
        BinaryOp::Mul => {
            if is_const(&a, 0.0) || is_const(&b, 0.0) {
                return constant(0.0);
            }
            if is_const(&a, 1.0) {
                return b;
            }
            if is_const(&b, 1.0) {
                return a;
            }
        }
        BinaryOp::Div => {
            if is_const(&b, 1.0) {
                return a;
            }
        }
    }
    Arc::new(Expr::Binary(op, a, b))
}

pub fn add(a: ExprRef, b: ExprRef) -> ExprRef {
    binary(BinaryOp::Add, a, b)
}

pub fn sub(a: ExprRef, b: ExprRef) -> ExprRef {
    binary(BinaryOp::Sub, a, b)
}

pub fn mul(a: ExprRef, b: ExprRef) -> ExprRef {
    binary(BinaryOp::Mul, a, b)
}

pub fn div(a: ExprRef, b: ExprRef) -> ExprRef {
    binary(BinaryOp::Div, a, b)
}

pub fn powi(a: ExprRef, n: i32) -> ExprRef {
    if n == 0 {
        return constant(1.0);
    }
    if n == 1 {
        return a;
    }
    if let Some(c) = as_const(&a) {
        if let Ok(enc) = c.enclosure.powi(n) {
            let value = c.value.powi(n);
            if value.is_finite() && enc.is_finite() {
                return literal(Constant {
                    value: value.clamp(enc.lo(), enc.hi()),
                    enclosure: enc,
                });
            }
        }
    }
    Arc::new(Expr::PowI(a, n))
}

impl Expr {
    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(k) => Some(*k),
            Expr::Unary(_, a) | Expr::PowI(a, _) => a.max_var(),
            Expr::Binary(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(usize)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(k) => f(*k),
            Expr::Unary(_, a) | Expr::PowI(a, _) => a.visit_vars(f),
            Expr::Binary(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => c.value,
            Expr::Var(k) => x[*k],
            Expr::Unary(op, a) => op.apply_f64(a.eval_real(x)),
            Expr::Binary(op, a, b) => op.apply_f64(a.eval_real(x), b.eval_real(x)),
            Expr::PowI(a, n) => a.eval_real(x).powi(*n),
        }
    }

    fn is_atom(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Const(c) => c.value >= 0.0,
            Expr::Unary(op, _) => *op != UnaryOp::Neg,
            _ => false,
        }
    }
}

pub(crate) fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => f.write_str(&format_number(c.value)),
            Expr::Var(k) => write!(f, "x{}", k + 1),
            Expr::Unary(UnaryOp::Neg, a) => {
                if a.is_atom() {
                    write!(f, "-{a}")
                } else {
                    write!(f, "-({a})")
                }
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => {
                write_operand(f, a)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, b)
            }
            Expr::PowI(a, n) => {
                if a.is_atom() {
                    write!(f, "{a}^{n}")
                } else {
                    write!(f, "({a})^{n}")
                }
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Binary(..) => write!(f, "({e})"),
        _ => write!(f, "{e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_rules() {
        let x = var(0);
        assert_eq!(*add(x.clone(), constant(0.0)), Expr::Var(0));
        assert_eq!(*mul(constant(0.0), x.clone()), Expr::Const(Constant::exact(0.0)));
        assert_eq!(*mul(constant(1.0), x.clone()), Expr::Var(0));
        assert_eq!(*powi(x.clone(), 1), Expr::Var(0));
        assert_eq!(*add(constant(2.0), constant(3.0)), Expr::Const(Constant::exact(5.0)));
        assert_eq!(*neg(neg(x.clone())), Expr::Var(0));
        // non-neutral constants are kept
        assert!(matches!(*mul(constant(2.0), x), Expr::Binary(BinaryOp::Mul, _, _)));
    }

    #[test]
    fn display_parenthesizes() {
        let e = mul(add(var(0), var(1)), powi(neg(var(0)), 2));
        assert_eq!(e.to_string(), "(x1 + x2) * (-x1)^2");
    }
}
