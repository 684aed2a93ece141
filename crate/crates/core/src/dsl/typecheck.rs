use std::collections::HashMap;
use std::sync::Arc;

use super::relation::{BinOp, Expr, Func};
use super::DslError;
use crate::exactlin::frac;
use crate::quantity::{DimSystem, DimVector};

/// Result type of an expression: a dimension or a truth value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Num(DimVector),
    Bool,
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Type::Num(d) => write!(f, "{d}"),
            Type::Bool => write!(f, "Bool"),
        }
    }
}

/// Variable dimensions over one system.
#[derive(Debug, Clone)]
pub struct TypeEnv {
    pub system: Arc<DimSystem>,
    pub vars: HashMap<String, DimVector>,
}

impl TypeEnv {
    pub fn new(system: &Arc<DimSystem>) -> Self {
        TypeEnv {
            system: Arc::clone(system),
            vars: HashMap::new(),
        }
    }

    pub fn with(mut self, name: &str, dim: DimVector) -> Self {
        self.vars.insert(name.to_string(), dim);
        self
    }
}

/// Dimensional type checking: sums and comparisons need equal dimensions,
/// transcendental functions and `is_pos_int` need dimensionless arguments,
/// `sqrt` halves exponents.
pub fn typecheck(expr: &Expr, env: &TypeEnv) -> Result<Type, DslError> {
    let zero = || DimVector::zero(&env.system);
    match expr {
        Expr::Var(n) => env
            .vars
            .get(n)
            .cloned()
            .map(Type::Num)
            .ok_or_else(|| DslError::UnknownVariable(n.clone())),
        Expr::Const(_) | Expr::Pi => Ok(Type::Num(zero())),
        Expr::Bool(_) => Ok(Type::Bool),
        Expr::Neg(a) => Ok(Type::Num(num(a, env, expr)?)),
        Expr::Bin(op, a, b) => {
            let da = num(a, env, expr)?;
            let db = num(b, env, expr)?;
            match op {
                BinOp::Add | BinOp::Sub => {
                    same(&da, &db, expr)?;
                    Ok(Type::Num(da))
                }
                BinOp::Mul => Ok(Type::Num(da.mul(&db)?)),
                BinOp::Div => Ok(Type::Num(da.div(&db)?)),
            }
        }
        Expr::Pow(a, p) => Ok(Type::Num(num(a, env, expr)?.pow(p))),
        Expr::Call(f, a) => {
            let d = num(a, env, expr)?;
            match f {
                Func::Sqrt => Ok(Type::Num(d.pow(&frac(1, 2)))),
                _ => {
                    same(&d, &zero(), expr)?;
                    if *f == Func::IsPosInt {
                        Ok(Type::Bool)
                    } else {
                        Ok(Type::Num(d))
                    }
                }
            }
        }
        Expr::Cmp(_, a, b) => {
            let da = num(a, env, expr)?;
            let db = num(b, env, expr)?;
            same(&da, &db, expr)?;
            Ok(Type::Bool)
        }
        Expr::And(a, b) | Expr::Or(a, b) => {
            boolean(a, env, expr)?;
            boolean(b, env, expr)?;
            Ok(Type::Bool)
        }
        Expr::Not(a) => {
            boolean(a, env, expr)?;
            Ok(Type::Bool)
        }
    }
}

fn num(e: &Expr, env: &TypeEnv, parent: &Expr) -> Result<DimVector, DslError> {
    match typecheck(e, env)? {
        Type::Num(d) => Ok(d),
        Type::Bool => Err(DslError::Type {
            node: parent.to_string(),
            msg: format!("'{e}' is a truth value where a number is expected"),
        }),
    }
}

fn boolean(e: &Expr, env: &TypeEnv, parent: &Expr) -> Result<(), DslError> {
    match typecheck(e, env)? {
        Type::Bool => Ok(()),
        Type::Num(d) => Err(DslError::Type {
            node: parent.to_string(),
            msg: format!("'{e}' has dimension {d} where a truth value is expected"),
        }),
    }
}

fn same(a: &DimVector, b: &DimVector, node: &Expr) -> Result<(), DslError> {
    if a == b {
        Ok(())
    } else {
        Err(DslError::Dimension {
            node: node.to_string(),
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}
