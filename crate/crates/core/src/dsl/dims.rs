use std::fmt;
use std::sync::Arc;

use super::lexer::{tokenize, Tok};
use super::{Cursor, DslError};
use crate::exactlin::{fmt_rational, Rational};
use crate::quantity::{DimSystem, DimVector, Quantity};
use crate::units::UnitRegistry;

/// Product/quotient/power expression over names; used for both dimensions
/// (names are fundamentals) and units (names are registry entries).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitExpr {
    One,
    Name(String),
    Mul(Box<UnitExpr>, Box<UnitExpr>),
    Div(Box<UnitExpr>, Box<UnitExpr>),
    Pow(Box<UnitExpr>, Rational),
}

impl UnitExpr {
    /// Folds the expression, resolving each name to `(log magnitude, dimension)`.
    pub fn fold<F>(
        &self,
        system: &Arc<DimSystem>,
        resolve: &F,
    ) -> Result<(f64, DimVector), DslError>
    where
        F: Fn(&str) -> Result<(f64, DimVector), DslError>,
    {
        match self {
            UnitExpr::One => Ok((0.0, DimVector::zero(system))),
            UnitExpr::Name(n) => resolve(n),
            UnitExpr::Mul(a, b) => {
                let (la, da) = a.fold(system, resolve)?;
                let (lb, db) = b.fold(system, resolve)?;
                Ok((la + lb, da.mul(&db)?))
            }
            UnitExpr::Div(a, b) => {
                let (la, da) = a.fold(system, resolve)?;
                let (lb, db) = b.fold(system, resolve)?;
                Ok((la - lb, da.div(&db)?))
            }
            UnitExpr::Pow(a, p) => {
                let (la, da) = a.fold(system, resolve)?;
                Ok((la * crate::exactlin::to_f64(p), da.pow(p)))
            }
        }
    }
}

impl fmt::Display for UnitExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitExpr::One => write!(f, "1"),
            UnitExpr::Name(n) => write!(f, "{n}"),
            UnitExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            UnitExpr::Div(a, b) => write!(f, "({a}/{b})"),
            UnitExpr::Pow(a, p) => write!(f, "{a}^({})", fmt_rational(p)),
        }
    }
}

fn unit_expr(c: &mut Cursor) -> Result<UnitExpr, DslError> {
    let mut lhs = unit_term(c)?;
    loop {
        if c.eat(&Tok::Star) {
            lhs = UnitExpr::Mul(Box::new(lhs), Box::new(unit_term(c)?));
        } else if c.eat(&Tok::Slash) {
            lhs = UnitExpr::Div(Box::new(lhs), Box::new(unit_term(c)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn unit_term(c: &mut Cursor) -> Result<UnitExpr, DslError> {
    let atom = match c.bump() {
        Some(Tok::Ident(n)) => UnitExpr::Name(n),
        Some(Tok::Number(s)) if s == "1" => UnitExpr::One,
        Some(Tok::LParen) => {
            let inner = unit_expr(c)?;
            c.expect(&Tok::RParen, "')'")?;
            inner
        }
        _ => {
            c.idx -= 1;
            return Err(c.error("expected a name, '1' or '('"));
        }
    };
    if c.eat(&Tok::Caret) {
        let p = c.rational()?;
        Ok(UnitExpr::Pow(Box::new(atom), p))
    } else {
        Ok(atom)
    }
}

/// Parses a bare unit or dimension expression.
pub fn parse_unit_expr(text: &str) -> Result<UnitExpr, DslError> {
    let toks = tokenize(text)?;
    let mut c = Cursor::new(&toks, text);
    let e = unit_expr(&mut c)?;
    c.finish()?;
    Ok(e)
}

/// Parses a dimension expression such as `M*L^2/T^2` over `system`.
pub fn parse_dimension(text: &str, system: &Arc<DimSystem>) -> Result<DimVector, DslError> {
    let e = parse_unit_expr(text)?;
    let (_, d) = e.fold(system, &|name: &str| {
        let i = system
            .index_of(name)
            .ok_or_else(|| DslError::UnknownFundamental(name.to_string()))?;
        Ok((0.0, DimVector::fundamental(system, i)))
    })?;
    Ok(d)
}

fn split_literal(text: &str) -> Result<(f64, Option<UnitExpr>), DslError> {
    let toks = tokenize(text)?;
    let mut c = Cursor::new(&toks, text);
    let neg = c.eat(&Tok::Minus);
    let magnitude = match c.bump() {
        Some(Tok::Number(s)) => s
            .parse::<f64>()
            .map_err(|_| DslError::InvalidLiteral(text.to_string()))?,
        _ => {
            c.idx -= 1;
            return Err(c.error("expected a magnitude"));
        }
    };
    if neg || !(magnitude > 0.0 && magnitude.is_finite()) {
        return Err(DslError::InvalidLiteral(format!(
            "'{text}': magnitudes must be positive"
        )));
    }
    if c.at_end() {
        return Ok((magnitude, None));
    }
    let unit = unit_expr(&mut c)?;
    c.finish()?;
    Ok((magnitude, Some(unit)))
}

/// Parses `<decimal> <unit-expr>` with names resolved in `registry`.
pub fn parse_quantity(text: &str, registry: &UnitRegistry) -> Result<Quantity, DslError> {
    let system = registry.system();
    let (magnitude, unit) = split_literal(text)?;
    let (log, dim) = match unit {
        None => (0.0, DimVector::zero(system)),
        Some(u) => u.fold(system, &|name: &str| {
            let q = registry
                .get(name)
                .ok_or_else(|| DslError::UnknownUnit(name.to_string()))?;
            Ok((q.log_magnitude(), q.dim().clone()))
        })?,
    };
    Ok(Quantity::from_log(magnitude.ln() + log, dim)?)
}

/// Parses `<decimal> <dim-expr>` where the names are fundamentals of
/// `system`, each standing for its reference unit of magnitude 1.
pub fn parse_quantity_in(text: &str, system: &Arc<DimSystem>) -> Result<Quantity, DslError> {
    let (magnitude, unit) = split_literal(text)?;
    let dim = match unit {
        None => DimVector::zero(system),
        Some(u) => {
            u.fold(system, &|name: &str| {
                let i = system
                    .index_of(name)
                    .ok_or_else(|| DslError::UnknownUnit(name.to_string()))?;
                Ok((0.0, DimVector::fundamental(system, i)))
            })?
            .1
        }
    };
    Ok(Quantity::new(magnitude, dim)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{frac, int};

    fn mlt() -> Arc<DimSystem> {
        DimSystem::new(&["M", "L", "T"]).unwrap()
    }

    #[test]
    fn dimension_examples() {
        let s = mlt();
        let d = parse_dimension("M*T^-2", &s).unwrap();
        assert_eq!(d.exponents(), &[int(1), int(0), int(-2)]);
        let d = parse_dimension("L^(1/2)", &s).unwrap();
        assert_eq!(d.exponents(), &[int(0), frac(1, 2), int(0)]);
        assert!(parse_dimension("1", &s).unwrap().is_dimensionless());
        let d = parse_dimension("M*L/(T*T)", &s).unwrap();
        assert_eq!(d.to_string(), "M*L*T^-2");
        let d = parse_dimension("(L/T)^(-3/2)", &s).unwrap();
        assert_eq!(d.to_string(), "L^(-3/2)*T^(3/2)");
    }

    #[test]
    fn dimension_errors() {
        let s = mlt();
        assert_eq!(
            parse_dimension("M*Q", &s),
            Err(DslError::UnknownFundamental("Q".into()))
        );
        assert!(matches!(
            parse_dimension("M*", &s),
            Err(DslError::Syntax { .. })
        ));
        assert!(matches!(
            parse_dimension("M^", &s),
            Err(DslError::Syntax { .. })
        ));
        assert!(matches!(
            parse_dimension("M L", &s),
            Err(DslError::Syntax { .. })
        ));
        assert!(matches!(
            parse_dimension("M^(1/0)", &s),
            Err(DslError::Syntax { .. })
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        let s = mlt();
        for text in ["M*L^2*T^-2", "L^(1/2)", "1", "M^(-2/3)*T^5"] {
            let d = parse_dimension(text, &s).unwrap();
            assert_eq!(d.to_string(), text);
            assert_eq!(parse_dimension(&d.to_string(), &s).unwrap(), d);
        }
    }

    #[test]
    fn quantity_in_reference_units() {
        let s = mlt();
        let q = parse_quantity_in("2 M", &s).unwrap();
        assert!((q.magnitude() - 2.0).abs() < 1e-15);
        assert_eq!(q.dim().to_string(), "M");
        let q = parse_quantity_in("0.5", &s).unwrap();
        assert!(q.dim().is_dimensionless());
        assert!(matches!(
            parse_quantity_in("-1 M", &s),
            Err(DslError::InvalidLiteral(_))
        ));
        assert!(matches!(
            parse_quantity_in("0 M", &s),
            Err(DslError::InvalidLiteral(_))
        ));
        assert_eq!(
            parse_quantity_in("1 kg", &s),
            Err(DslError::UnknownUnit("kg".into()))
        );
    }
}
