//! Symbolic partial derivatives and Lie derivatives.

use std::collections::HashMap;

use super::expr::{self as e, Expr, ExprRef, UnaryOp};

/// `∂ expr / ∂ x_var`.
pub fn differentiate(expr: &ExprRef, var: usize) -> ExprRef {
    let mut memo = HashMap::new();
    diff_memo(expr, var, &mut memo)
}

// Shared subtrees (common after repeated differentiation) are differentiated once.
fn diff_memo(expr: &ExprRef, var: usize, memo: &mut HashMap<*const Expr, ExprRef>) -> ExprRef {
    let key = ExprRef::as_ptr(expr);
    if let Some(d) = memo.get(&key) {
        return d.clone();
    }
    let d = match &**expr {
        Expr::Const(_) => e::constant(0.0),
        Expr::Var(k) => e::constant(if *k == var { 1.0 } else { 0.0 }),
        Expr::Unary(op, a) => {
            let da = diff_memo(a, var, memo);
            if e::is_const(&da, 0.0) {
                da
            } else {
                let outer = match op {
                    UnaryOp::Neg => e::constant(-1.0),
                    UnaryOp::Sin => e::unary(UnaryOp::Cos, a.clone()),
                    UnaryOp::Cos => e::neg(e::unary(UnaryOp::Sin, a.clone())),
                    UnaryOp::Tan => e::add(e::constant(1.0), e::powi(expr.clone(), 2)),
                    UnaryOp::Tanh => e::sub(e::constant(1.0), e::powi(expr.clone(), 2)),
                    UnaryOp::Exp => expr.clone(),
                    UnaryOp::Ln => {
                        return memoize(memo, key, e::div(da, a.clone()));
                    }
                    UnaryOp::Sqrt => {
                        return memoize(memo, key, e::div(da, e::mul(e::constant(2.0), expr.clone())));
                    }
                };
                if *op == UnaryOp::Neg {
                    e::neg(da)
                } else {
                    e::mul(outer, da)
                }
            }
        }
        Expr::Binary(op, a, b) => {
            let da = diff_memo(a, var, memo);
            let db = diff_memo(b, var, memo);
            match op {
                e::BinaryOp::Add => e::add(da, db),
                e::BinaryOp::Sub => e::sub(da, db),
                e::BinaryOp::Mul => e::add(e::mul(da, b.clone()), e::mul(a.clone(), db)),
                e::BinaryOp::Div => {
                    if e::is_const(&db, 0.0) {
                        e::div(da, b.clone())
                    } else {
                        e::div(
                            e::sub(e::mul(da, b.clone()), e::mul(a.clone(), db)),
                            e::powi(b.clone(), 2),
                        )
                    }
                }
            }
        }
        Expr::PowI(a, n) => {
            let da = diff_memo(a, var, memo);
            e::mul(
                e::mul(e::constant(*n as f64), e::powi(a.clone(), n - 1)),
                da,
            )
        }
    };
    memoize(memo, key, d)
}

fn memoize(memo: &mut HashMap<*const Expr, ExprRef>, key: *const Expr, d: ExprRef) -> ExprRef {
    memo.insert(key, d.clone());
    d
}

/// Jacobian `J[j][k] = ∂ rhs_j / ∂ x_k`.
pub fn jacobian(rhs: &[ExprRef]) -> Vec<Vec<ExprRef>> {
    let n = rhs.len();
    rhs.iter()
        .map(|f| {
            let mut memo_per_var: Vec<ExprRef> = Vec::with_capacity(n);
            for k in 0..n {
                memo_per_var.push(differentiate(f, k));
            }
            memo_per_var
        })
        .collect()
}

/// One Lie differentiation along `rhs`: `(L g)_j = Σ_k ∂g_j/∂x_k · rhs_k`.
pub fn lie_step(g: &[ExprRef], rhs: &[ExprRef]) -> Vec<ExprRef> {
    g.iter()
        .map(|gj| {
            let mut acc = e::constant(0.0);
            for (k, fk) in rhs.iter().enumerate() {
                let d = differentiate(gj, k);
                if e::is_const(&d, 0.0) {
                    continue;
                }
                acc = e::add(acc, e::mul(d, fk.clone()));
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse::parse_expr;

    fn fd(expr: &ExprRef, x: &[f64], k: usize) -> f64 {
        let h = 1e-6;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        (expr.eval_real(&xp) - expr.eval_real(&xm)) / (2.0 * h)
    }

    #[test]
    fn polynomial_rule() {
        let f = parse_expr("1 + x1^2*x2 - 2.5*x1", 2).unwrap();
        let d = differentiate(&f, 0);
        for &(a, b) in &[(1.0, 1.0), (0.3, -2.0), (-1.5, 4.0)] {
            assert!((d.eval_real(&[a, b]) - (2.0 * a * b - 2.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn sin_derivative_is_cos() {
        let f = parse_expr("sin(x1)", 1).unwrap();
        assert_eq!(differentiate(&f, 0).to_string(), "cos(x1)");
    }

    #[test]
    fn every_function_matches_finite_differences() {
        let srcs = [
            "sin(x1*x2)", "cos(x1) / (2 + x2^2)", "tan(0.3*x1)", "tanh(3*x1 - x2)",
            "exp(-x1*x2)", "ln(1 + x1^2)", "sqrt(2 + x2^2) * x1", "x1^-2 + x2^3",
            "-(x1 - x2)^2",
        ];
        let x = [0.7, -0.4];
        for s in srcs {
            let f = parse_expr(s, 2).unwrap();
            for k in 0..2 {
                let sym = differentiate(&f, k).eval_real(&x);
                let num = fd(&f, &x, k);
                assert!((sym - num).abs() <= 1e-6 * (1.0 + sym.abs()), "{s} d/dx{k}: {sym} vs {num}");
            }
        }
    }

    #[test]
    fn lie_derivative_of_linear_field() {
        // x' = -x: L f = -(-x) = x
        let rhs = vec![parse_expr("-x1", 1).unwrap()];
        let l2 = lie_step(&rhs, &rhs);
        assert_eq!(l2[0].eval_real(&[3.0]), 3.0);
    }
}
