//! Straight-line evaluation tapes.
//!
//! A set of expressions is flattened into one instruction list with
//! structural hash-consing, so common subexpressions (plentiful in
//! Jacobians and Lie derivatives) are evaluated once per call.

use std::collections::HashMap;

use super::expr::{BinaryOp, Expr, ExprRef, UnaryOp};
use crate::interval::{Interval, IntervalError};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Const { value: f64, enclosure: Interval },
    Var(usize),
    Unary(UnaryOp, u32),
    Binary(BinaryOp, u32, u32),
    PowI(u32, i32),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Const(u64, u64, u64),
    Var(usize),
    Unary(UnaryOp, u32),
    Binary(BinaryOp, u32, u32),
    PowI(u32, i32),
}

/// Failure while evaluating a tape over intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    /// Rendering of the failing subexpression (truncated).
    pub location: String,
    pub source: IntervalError,
}

#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<u32>,
}

impl Tape {
    pub fn compile(exprs: &[ExprRef]) -> Tape {
        let mut b = Builder::default();
        let outputs = exprs.iter().map(|e| b.visit(e)).collect();
        Tape { ops: b.ops, outputs }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Floating-point evaluation. `scratch` is reused across calls.
    pub fn eval_f64(&self, x: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        scratch.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Const { value, .. } => value,
                Op::Var(k) => x[k],
                Op::Unary(u, a) => u.apply_f64(scratch[a as usize]),
                Op::Binary(b, l, r) => b.apply_f64(scratch[l as usize], scratch[r as usize]),
                Op::PowI(a, n) => scratch[a as usize].powi(n),
            };
            scratch.push(v);
        }
        for (o, &idx) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[idx as usize];
        }
    }

    pub fn eval_f64_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut scratch = Vec::with_capacity(self.ops.len());
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_f64(x, &mut scratch, &mut out);
        out
    }

    /// Interval evaluation; the result encloses the range of every output over `x`.
    pub fn eval_interval(&self, x: &[Interval]) -> Result<Vec<Interval>, EvalError> {
        let mut vals: Vec<Interval> = Vec::with_capacity(self.ops.len());
        for (i, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const { enclosure, .. } => Ok(enclosure),
                Op::Var(k) => Ok(x[k]),
                Op::Unary(u, a) => u.apply_interval(vals[a as usize]),
                Op::Binary(b, l, r) => b.apply_interval(vals[l as usize], vals[r as usize]),
                Op::PowI(a, n) => vals[a as usize].powi(n),
            };
            match v {
                Ok(v) => vals.push(v),
                Err(source) => {
                    return Err(EvalError {
                        location: self.render(i as u32, 160),
                        source,
                    })
                }
            }
        }
        Ok(self.outputs.iter().map(|&i| vals[i as usize]).collect())
    }

    fn render(&self, idx: u32, budget: usize) -> String {
        let mut s = String::new();
        self.render_into(idx, &mut s, budget);
        if s.len() > budget {
            s.truncate(budget);
            s.push_str("...");
        }
        s
    }

    fn render_into(&self, idx: u32, s: &mut String, budget: usize) {
        if s.len() > budget {
            return;
        }
        match self.ops[idx as usize] {
            Op::Const { value, .. } => s.push_str(&super::expr::format_number(value)),
            Op::Var(k) => s.push_str(&format!("x{}", k + 1)),
            Op::Unary(UnaryOp::Neg, a) => {
                s.push_str("-(");
                self.render_into(a, s, budget);
                s.push(')');
            }
            Op::Unary(u, a) => {
                s.push_str(u.name());
                s.push('(');
                self.render_into(a, s, budget);
                s.push(')');
            }
            Op::Binary(b, l, r) => {
                s.push('(');
                self.render_into(l, s, budget);
                s.push_str(match b {
                    BinaryOp::Add => " + ",
                    BinaryOp::Sub => " - ",
                    BinaryOp::Mul => " * ",
                    BinaryOp::Div => " / ",
                });
                self.render_into(r, s, budget);
                s.push(')');
            }
            Op::PowI(a, n) => {
                s.push('(');
                self.render_into(a, s, budget);
                s.push_str(&format!(")^{n}"));
            }
        }
    }
}

#[derive(Default)]
struct Builder {
    ops: Vec<Op>,
    interned: HashMap<Key, u32>,
    visited: HashMap<*const Expr, u32>,
}

impl Builder {
    fn visit(&mut self, e: &ExprRef) -> u32 {
        let ptr = ExprRef::as_ptr(e);
        if let Some(&i) = self.visited.get(&ptr) {
            return i;
        }
        let (op, key) = match &**e {
            Expr::Const(c) => (
                Op::Const {
                    value: c.value,
                    enclosure: c.enclosure,
                },
                Key::Const(c.value.to_bits(), c.enclosure.lo().to_bits(), c.enclosure.hi().to_bits()),
            ),
            Expr::Var(k) => (Op::Var(*k), Key::Var(*k)),
            Expr::Unary(u, a) => {
                let a = self.visit(a);
                (Op::Unary(*u, a), Key::Unary(*u, a))
            }
            Expr::Binary(b, l, r) => {
                let l = self.visit(l);
                let r = self.visit(r);
                (Op::Binary(*b, l, r), Key::Binary(*b, l, r))
            }
            Expr::PowI(a, n) => {
                let a = self.visit(a);
                (Op::PowI(a, *n), Key::PowI(a, *n))
            }
        };
        let idx = match self.interned.get(&key) {
            Some(&i) => i,
            None => {
                let i = self.ops.len() as u32;
                self.ops.push(op);
                self.interned.insert(key, i);
                i
            }
        };
        self.visited.insert(ptr, idx);
        idx
    }
}
