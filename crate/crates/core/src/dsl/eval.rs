//! Evaluation against quantity bindings.
//!
//! Products, quotients and powers of positive values stay in log space.
//! Sums and differences leave it, and their result is re-logged only when it
//! is positive, so negative intermediates are possible inside comparisons.

use std::collections::HashMap;
use std::sync::Arc;

use super::relation::{BinOp, CmpOp, Expr, Func};
use super::DslError;
use crate::exactlin::{frac, to_f64};
use crate::quantity::{DimSystem, DimVector, Quantity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Relative tolerance for `=` and the other comparisons, and the absolute
    /// tolerance of `is_pos_int`.
    pub tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Repr {
    Log(f64),
    Lin(f64),
}

/// A numeric result in the reference units of `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Number {
    repr: Repr,
    dim: DimVector,
}

impl Number {
    fn log(v: f64, dim: DimVector) -> Number {
        Number {
            repr: Repr::Log(v),
            dim,
        }
    }

    fn lin(v: f64, dim: DimVector) -> Number {
        let repr = if v > 0.0 && v.is_finite() {
            Repr::Log(v.ln())
        } else {
            Repr::Lin(v)
        };
        Number { repr, dim }
    }

    pub fn value(&self) -> f64 {
        match self.repr {
            Repr::Log(l) => l.exp(),
            Repr::Lin(v) => v,
        }
    }

    /// Natural log of the value; NaN when the value is not positive.
    pub fn ln(&self) -> f64 {
        match self.repr {
            Repr::Log(l) => l,
            Repr::Lin(v) if v > 0.0 => v.ln(),
            Repr::Lin(_) => f64::NAN,
        }
    }

    pub fn dim(&self) -> &DimVector {
        &self.dim
    }

    /// The value as a quantity, when it is positive.
    pub fn to_quantity(&self) -> Option<Quantity> {
        match self.repr {
            Repr::Log(l) => Quantity::from_log(l, self.dim.clone()).ok(),
            Repr::Lin(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluated {
    Number(Number),
    Truth(bool),
}

impl Evaluated {
    pub fn truth(&self) -> Option<bool> {
        match self {
            Evaluated::Truth(b) => Some(*b),
            Evaluated::Number(_) => None,
        }
    }

    pub fn number(&self) -> Option<&Number> {
        match self {
            Evaluated::Number(n) => Some(n),
            Evaluated::Truth(_) => None,
        }
    }
}

/// Evaluates `expr` with variables bound to quantities. The expression is
/// expected to have passed [`typecheck`](super::typecheck) against the
/// binding dimensions.
pub fn evaluate(
    expr: &Expr,
    system: &Arc<DimSystem>,
    bindings: &HashMap<String, Quantity>,
    opts: EvalOptions,
) -> Result<Evaluated, DslError> {
    Evaluator {
        system,
        lookup: &|n| bindings.get(n),
        opts,
    }
    .eval(expr)
}

pub(crate) struct Evaluator<'a> {
    pub system: &'a Arc<DimSystem>,
    pub lookup: &'a dyn Fn(&str) -> Option<&'a Quantity>,
    pub opts: EvalOptions,
}

impl Evaluator<'_> {
    fn zero(&self) -> DimVector {
        DimVector::zero(self.system)
    }

    fn num(&self, e: &Expr) -> Result<Number, DslError> {
        match self.eval(e)? {
            Evaluated::Number(n) => Ok(n),
            Evaluated::Truth(_) => Err(DslError::Type {
                node: e.to_string(),
                msg: "expected a number".into(),
            }),
        }
    }

    fn truth(&self, e: &Expr) -> Result<bool, DslError> {
        match self.eval(e)? {
            Evaluated::Truth(b) => Ok(b),
            Evaluated::Number(_) => Err(DslError::Type {
                node: e.to_string(),
                msg: "expected a truth value".into(),
            }),
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Evaluated, DslError> {
        let n = match e {
            Expr::Var(name) => {
                let q =
                    (self.lookup)(name).ok_or_else(|| DslError::UnknownVariable(name.clone()))?;
                Number::log(q.log_magnitude(), q.dim().clone())
            }
            Expr::Const(c) => Number::lin(*c, self.zero()),
            Expr::Pi => Number::log(std::f64::consts::PI.ln(), self.zero()),
            Expr::Bool(b) => return Ok(Evaluated::Truth(*b)),
            Expr::Neg(a) => {
                let a = self.num(a)?;
                Number::lin(-a.value(), a.dim)
            }
            Expr::Bin(op, a, b) => {
                let a = self.num(a)?;
                let b = self.num(b)?;
                match op {
                    BinOp::Add => Number::lin(a.value() + b.value(), a.dim),
                    BinOp::Sub => Number::lin(a.value() - b.value(), a.dim),
                    BinOp::Mul => {
                        let dim = a.dim.mul(&b.dim)?;
                        match (a.repr, b.repr) {
                            (Repr::Log(x), Repr::Log(y)) => Number::log(x + y, dim),
                            _ => Number::lin(a.value() * b.value(), dim),
                        }
                    }
                    BinOp::Div => {
                        let dim = a.dim.div(&b.dim)?;
                        match (a.repr, b.repr) {
                            (Repr::Log(x), Repr::Log(y)) => Number::log(x - y, dim),
                            _ => Number::lin(a.value() / b.value(), dim),
                        }
                    }
                }
            }
            Expr::Pow(a, p) => pow(self.num(a)?, p),
            Expr::Call(f, a) => {
                let a = self.num(a)?;
                match f {
                    // exp(x) is positive; its log is x itself.
                    Func::Exp => Number::log(a.value(), a.dim),
                    Func::Log => Number::lin(a.ln(), a.dim),
                    Func::Sin => Number::lin(a.value().sin(), a.dim),
                    Func::Cos => Number::lin(a.value().cos(), a.dim),
                    Func::Sqrt => pow(a, &frac(1, 2)),
                    Func::IsPosInt => {
                        let v = a.value();
                        let r = v.round();
                        return Ok(Evaluated::Truth(r >= 1.0 && (v - r).abs() <= self.opts.tol));
                    }
                }
            }
            Expr::Cmp(op, a, b) => {
                let a = self.num(a)?;
                let b = self.num(b)?;
                return Ok(Evaluated::Truth(compare(*op, &a, &b, self.opts.tol)));
            }
            Expr::And(a, b) => return Ok(Evaluated::Truth(self.truth(a)? && self.truth(b)?)),
            Expr::Or(a, b) => return Ok(Evaluated::Truth(self.truth(a)? || self.truth(b)?)),
            Expr::Not(a) => return Ok(Evaluated::Truth(!self.truth(a)?)),
        };
        Ok(Evaluated::Number(n))
    }
}

fn pow(a: Number, p: &crate::exactlin::Rational) -> Number {
    let dim = a.dim.pow(p);
    let pf = to_f64(p);
    match a.repr {
        Repr::Log(l) => Number::log(l * pf, dim),
        Repr::Lin(v) if p.is_integer() => Number::lin(v.powf(pf), dim),
        // Non-integer power of a non-positive value.
        Repr::Lin(_) => Number::lin(f64::NAN, dim),
    }
}

/// `a = b` iff `|a - b| <= tol * max(|a|, |b|)`; orderings exclude that band.
fn approx_eq(a: &Number, b: &Number, tol: f64) -> bool {
    match (a.repr, b.repr) {
        (Repr::Log(x), Repr::Log(y)) => -(-(x - y).abs()).exp_m1() <= tol,
        _ => {
            let (x, y) = (a.value(), b.value());
            (x - y).abs() <= tol * x.abs().max(y.abs())
        }
    }
}

fn less(a: &Number, b: &Number) -> bool {
    match (a.repr, b.repr) {
        (Repr::Log(x), Repr::Log(y)) => x < y,
        _ => a.value() < b.value(),
    }
}

fn compare(op: CmpOp, a: &Number, b: &Number, tol: f64) -> bool {
    let eq = approx_eq(a, b, tol);
    match op {
        CmpOp::Eq => eq,
        CmpOp::Ne => !eq,
        CmpOp::Lt => !eq && less(a, b),
        CmpOp::Le => eq || less(a, b),
        CmpOp::Gt => !eq && less(b, a),
        CmpOp::Ge => eq || less(b, a),
    }
}
