//! Surface syntax: dimension expressions, quantity literals and relations.
//!
//! Grammar for dimensions and units:
//!
//! ```text
//! dim  := term (("*" | "/") term)*
//! term := atom ("^" rat)?
//! atom := name | "(" dim ")" | "1"
//! rat  := ["-"] number | "(" ["-"] number ["/" ["-"] number] ")"
//! qty  := number [dim]            # names resolve to registry units
//! ```
//!
//! Relations use conventional infix arithmetic over variables, dimensionless
//! constants and `pi`, comparisons (`=`, `!=`, `<`, `<=`, `>`, `>=`), the
//! functions `exp log sin cos sqrt is_pos_int`, and boolean `not`/`and`/`or`
//! (also `!`, `&&`, `||`). `or` binds loosest, then `and`, then `not`.

mod dims;
mod eval;
mod lexer;
mod problem;
mod relation;
mod typecheck;

pub use dims::{parse_dimension, parse_quantity, parse_quantity_in, parse_unit_expr, UnitExpr};
pub use eval::{evaluate, EvalOptions, Evaluated, Number};
pub use problem::{Problem, ProblemSpec};
pub use relation::{parse_relation, BinOp, CmpOp, Expr, Func};
pub use typecheck::{typecheck, Type, TypeEnv};

use thiserror::Error;

use crate::quantity::SettingError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown fundamental dimension '{0}'")]
    UnknownFundamental(String),
    #[error("unknown unit '{0}'")]
    UnknownUnit(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("dimension error in {node}: {left} vs {right}")]
    Dimension {
        node: String,
        left: String,
        right: String,
    },
    #[error("type error in {node}: {msg}")]
    Type { node: String, msg: String },
    #[error("invalid quantity literal: {0}")]
    InvalidLiteral(String),
    #[error(transparent)]
    Setting(#[from] SettingError),
    #[error("problem spec: {0}")]
    Spec(String),
}

use lexer::{Tok, Token};

/// Token cursor shared by the dimension and relation parsers.
struct Cursor<'a> {
    toks: &'a [Token],
    idx: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], src: &str) -> Self {
        Cursor {
            toks,
            idx: 0,
            end: src.chars().count(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|t| t.tok.clone());
        self.idx += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), DslError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    fn error(&self, msg: impl Into<String>) -> DslError {
        DslError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn finish(&self) -> Result<(), DslError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }

    /// Rational exponent after `^`.
    fn rational(&mut self) -> Result<crate::exactlin::Rational, DslError> {
        let signed_number = |c: &mut Cursor| -> Result<crate::exactlin::Rational, DslError> {
            let neg = c.eat(&Tok::Minus);
            match c.bump() {
                Some(Tok::Number(s)) => {
                    let r = decimal_to_rational(&s).ok_or_else(|| c.error("bad number"))?;
                    Ok(if neg { -r } else { r })
                }
                _ => {
                    c.idx -= 1;
                    Err(c.error("expected a rational exponent"))
                }
            }
        };
        if self.eat(&Tok::LParen) {
            let num = signed_number(self)?;
            let r = if self.eat(&Tok::Slash) {
                let den = signed_number(self)?;
                if num_traits::Zero::is_zero(&den) {
                    return Err(self.error("zero denominator in exponent"));
                }
                num / den
            } else {
                num
            };
            self.expect(&Tok::RParen, "')'")?;
            Ok(r)
        } else {
            signed_number(self)
        }
    }
}

/// Exact value of a decimal literal such as `2.5` or `1e-3`.
pub(crate) fn decimal_to_rational(s: &str) -> Option<crate::exactlin::Rational> {
    use num_bigint::BigInt;
    use num_traits::Pow;
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() {
        "0".to_string()
    } else {
        digits
    };
    let n: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        crate::exactlin::Rational::from_integer(n * Pow::pow(&ten, scale as u32))
    } else {
        crate::exactlin::Rational::new(n, Pow::pow(&ten, (-scale) as u32))
    };
    Some(r)
}
