use std::fmt;

use super::lexer::{tokenize, Tok};
use super::{Cursor, DslError};
use crate::exactlin::{fmt_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    IsPosInt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "is_pos_int" => Func::IsPosInt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::IsPosInt => "is_pos_int",
        }
    }
}

/// A relation over dimensioned variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    /// Dimensionless decimal constant.
    Const(f64),
    Pi,
    Bool(bool),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Call(Func, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Expr {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn pow(a: Expr, p: Rational) -> Expr {
        Expr::Pow(Box::new(a), p)
    }

    /// Free variables in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Expr::Const(_) | Expr::Pi | Expr::Bool(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) | Expr::Not(a) => a.collect_vars(out),
            Expr::Bin(_, a, b) | Expr::Cmp(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized; parses back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Pow(a, p) => write!(f, "{a}^({})", fmt_rational(p)),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Cmp(op, a, b) => {
                let sym = match op {
                    CmpOp::Eq => "=",
                    CmpOp::Ne => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::And(a, b) => write!(f, "({a} and {b})"),
            Expr::Or(a, b) => write!(f, "({a} or {b})"),
            Expr::Not(a) => write!(f, "(not {a})"),
        }
    }
}

/// Parses a relation or arithmetic expression.
pub fn parse_relation(text: &str) -> Result<Expr, DslError> {
    let toks = tokenize(text)?;
    let mut c = Cursor::new(&toks, text);
    let e = expr(&mut c, 0)?;
    c.finish()?;
    Ok(e)
}

// Binding powers, loosest first.
const BP_OR: u8 = 1;
const BP_AND: u8 = 2;
const BP_NOT: u8 = 3;
const BP_CMP: u8 = 4;
const BP_ADD: u8 = 5;
const BP_MUL: u8 = 6;
const BP_NEG: u8 = 7;

fn is_kw(t: Option<&Tok>, kw: &str) -> bool {
    matches!(t, Some(Tok::Ident(n)) if n == kw)
}

fn expr(c: &mut Cursor, min_bp: u8) -> Result<Expr, DslError> {
    let mut lhs = prefix(c)?;
    loop {
        let next = c.peek();
        let bp = match next {
            Some(Tok::OrOr) => BP_OR,
            _ if is_kw(next, "or") => BP_OR,
            Some(Tok::AndAnd) => BP_AND,
            _ if is_kw(next, "and") => BP_AND,
            Some(Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge) => BP_CMP,
            Some(Tok::Plus | Tok::Minus) => BP_ADD,
            Some(Tok::Star | Tok::Slash) => BP_MUL,
            _ => return Ok(lhs),
        };
        if bp <= min_bp {
            return Ok(lhs);
        }
        let op = c.bump().expect("peeked");
        lhs = match op {
            Tok::OrOr => Expr::Or(Box::new(lhs), Box::new(expr(c, bp)?)),
            Tok::AndAnd => Expr::And(Box::new(lhs), Box::new(expr(c, bp)?)),
            Tok::Ident(kw) if kw == "or" => Expr::Or(Box::new(lhs), Box::new(expr(c, bp)?)),
            Tok::Ident(_) => Expr::And(Box::new(lhs), Box::new(expr(c, bp)?)),
            Tok::Plus => Expr::bin(BinOp::Add, lhs, expr(c, bp)?),
            Tok::Minus => Expr::bin(BinOp::Sub, lhs, expr(c, bp)?),
            Tok::Star => Expr::bin(BinOp::Mul, lhs, expr(c, bp)?),
            Tok::Slash => Expr::bin(BinOp::Div, lhs, expr(c, bp)?),
            cmp => {
                let op = match cmp {
                    Tok::Eq => CmpOp::Eq,
                    Tok::Ne => CmpOp::Ne,
                    Tok::Lt => CmpOp::Lt,
                    Tok::Le => CmpOp::Le,
                    Tok::Gt => CmpOp::Gt,
                    _ => CmpOp::Ge,
                };
                let rhs = expr(c, bp)?;
                // Comparisons do not chain.
                if matches!(
                    c.peek(),
                    Some(Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)
                ) {
                    return Err(c.error("comparisons cannot be chained"));
                }
                Expr::cmp(op, lhs, rhs)
            }
        };
    }
}

fn prefix(c: &mut Cursor) -> Result<Expr, DslError> {
    if c.eat(&Tok::Bang) {
        return Ok(Expr::Not(Box::new(expr(c, BP_NOT)?)));
    }
    if is_kw(c.peek(), "not") {
        c.bump();
        return Ok(Expr::Not(Box::new(expr(c, BP_NOT)?)));
    }
    if c.eat(&Tok::Minus) {
        return Ok(Expr::Neg(Box::new(expr(c, BP_NEG)?)));
    }
    let atom = primary(c)?;
    postfix_pow(c, atom)
}

fn postfix_pow(c: &mut Cursor, mut base: Expr) -> Result<Expr, DslError> {
    while c.eat(&Tok::Caret) {
        let p = c.rational()?;
        base = Expr::pow(base, p);
    }
    Ok(base)
}

fn primary(c: &mut Cursor) -> Result<Expr, DslError> {
    let pos = c.pos();
    match c.bump() {
        Some(Tok::Number(s)) => s
            .parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| DslError::Syntax {
                pos,
                msg: format!("bad number '{s}'"),
            }),
        Some(Tok::LParen) => {
            let e = expr(c, 0)?;
            c.expect(&Tok::RParen, "')'")?;
            Ok(e)
        }
        Some(Tok::Ident(name)) => match name.as_str() {
            "pi" => Ok(Expr::Pi),
            "true" => Ok(Expr::Bool(true)),
            "false" => Ok(Expr::Bool(false)),
            "and" | "or" | "not" => Err(DslError::Syntax {
                pos,
                msg: format!("unexpected keyword '{name}'"),
            }),
            _ => {
                if c.peek() == Some(&Tok::LParen) {
                    let func = Func::from_name(&name).ok_or_else(|| DslError::Syntax {
                        pos,
                        msg: format!("unknown function '{name}'"),
                    })?;
                    c.bump();
                    let arg = expr(c, 0)?;
                    c.expect(&Tok::RParen, "')' after function argument")?;
                    Ok(Expr::call(func, arg))
                } else {
                    Ok(Expr::Var(name))
                }
            }
        },
        _ => Err(DslError::Syntax {
            pos,
            msg: "expected a number, name or '('".into(),
        }),
    }
}
