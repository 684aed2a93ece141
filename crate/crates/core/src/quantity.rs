//! Dimensions, positive quantities and monomial maps between them.
//!
//! A [`Quantity`] is a strictly positive magnitude stored as its natural log,
//! paired with an exact [`DimVector`]. Under this representation products and
//! rational powers of quantities are linear in both parts, which is exactly the
//! vector-space structure the rest of the crate relies on.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactlin::{fmt_rational, to_f64, QMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SettingError {
    #[error("invalid dimension system: {0}")]
    InvalidSystem(String),
    #[error("values belong to different dimension systems")]
    SystemMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("expected {expected} inputs, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("magnitude must be positive and finite, got {0}")]
    NonPositive(f64),
}

/// An ordered list of fundamental dimension names, e.g. `M`, `L`, `T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimSystem {
    names: Vec<String>,
}

impl DimSystem {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>, SettingError> {
        if names.is_empty() {
            return Err(SettingError::InvalidSystem(
                "at least one fundamental dimension is required".into(),
            ));
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            if !is_identifier(name) {
                return Err(SettingError::InvalidSystem(format!(
                    "'{name}' is not an identifier"
                )));
            }
            if out.iter().any(|n| n == name) {
                return Err(SettingError::InvalidSystem(format!(
                    "duplicate fundamental '{name}'"
                )));
            }
            out.push(name.to_string());
        }
        Ok(Arc::new(DimSystem { names: out }))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// An element of the dimension space: one rational exponent per fundamental.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimVector {
    system: Arc<DimSystem>,
    exponents: Vec<Rational>,
}

impl DimVector {
    pub fn new(system: &Arc<DimSystem>, exponents: Vec<Rational>) -> Result<Self, SettingError> {
        if exponents.len() != system.len() {
            return Err(SettingError::Arity {
                expected: system.len(),
                found: exponents.len(),
            });
        }
        Ok(DimVector {
            system: Arc::clone(system),
            exponents,
        })
    }

    /// The dimensionless class.
    pub fn zero(system: &Arc<DimSystem>) -> Self {
        DimVector {
            system: Arc::clone(system),
            exponents: vec![Rational::zero(); system.len()],
        }
    }

    /// The `i`-th fundamental dimension to the first power.
    pub fn fundamental(system: &Arc<DimSystem>, i: usize) -> Self {
        let mut d = Self::zero(system);
        d.exponents[i] = Rational::one();
        d
    }

    pub fn system(&self) -> &Arc<DimSystem> {
        &self.system
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exponents.iter().all(Zero::is_zero)
    }

    pub fn same_system(&self, other: &DimVector) -> bool {
        Arc::ptr_eq(&self.system, &other.system) || self.system == other.system
    }

    fn check_system(&self, other: &DimVector) -> Result<(), SettingError> {
        if self.same_system(other) {
            Ok(())
        } else {
            Err(SettingError::SystemMismatch)
        }
    }

    /// Product of dimensions (exponent addition).
    pub fn mul(&self, other: &DimVector) -> Result<DimVector, SettingError> {
        self.check_system(other)?;
        Ok(DimVector {
            system: Arc::clone(&self.system),
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn div(&self, other: &DimVector) -> Result<DimVector, SettingError> {
        self.mul(&other.pow(&-Rational::one()))
    }

    pub fn pow(&self, p: &Rational) -> DimVector {
        DimVector {
            system: Arc::clone(&self.system),
            exponents: self.exponents.iter().map(|e| e * p).collect(),
        }
    }
}

impl fmt::Display for DimVector {
    /// Normalized form: `M*L^2*T^-2`, `L^(1/2)`, or `1` when dimensionless.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .system
            .names
            .iter()
            .zip(&self.exponents)
            .filter(|(_, e)| !e.is_zero())
            .map(|(name, e)| format_power(name, e))
            .collect();
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

/// `name`, `name^k` or `name^(p/q)`.
pub(crate) fn format_power(name: &str, e: &Rational) -> String {
    if e.is_one() {
        name.to_string()
    } else if e.is_integer() {
        format!("{name}^{}", e.numer())
    } else {
        format!("{name}^({})", fmt_rational(e))
    }
}

/// A positive physical quantity: `exp(log_magnitude)` reference units of `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    log_magnitude: f64,
    dim: DimVector,
}

impl Quantity {
    pub fn new(magnitude: f64, dim: DimVector) -> Result<Self, SettingError> {
        if !(magnitude > 0.0 && magnitude.is_finite()) {
            return Err(SettingError::NonPositive(magnitude));
        }
        Ok(Quantity {
            log_magnitude: magnitude.ln(),
            dim,
        })
    }

    pub fn from_log(log_magnitude: f64, dim: DimVector) -> Result<Self, SettingError> {
        if !log_magnitude.is_finite() {
            return Err(SettingError::NonPositive(log_magnitude.exp()));
        }
        Ok(Quantity { log_magnitude, dim })
    }

    /// The dimensionless value 1.
    pub fn one(system: &Arc<DimSystem>) -> Self {
        Quantity {
            log_magnitude: 0.0,
            dim: DimVector::zero(system),
        }
    }

    /// Magnitude 1 in the reference units of `dim`.
    pub fn unit(dim: DimVector) -> Self {
        Quantity {
            log_magnitude: 0.0,
            dim,
        }
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn magnitude(&self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn dim(&self) -> &DimVector {
        &self.dim
    }

    pub fn system(&self) -> &Arc<DimSystem> {
        self.dim.system()
    }

    pub fn mul(&self, other: &Quantity) -> Result<Quantity, SettingError> {
        Ok(Quantity {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            dim: self.dim.mul(&other.dim)?,
        })
    }

    pub fn pow(&self, p: &Rational) -> Quantity {
        Quantity {
            log_magnitude: self.log_magnitude * to_f64(p),
            dim: self.dim.pow(p),
        }
    }

    /// Multiplies the magnitude by `exp(delta)` keeping the dimension.
    pub fn scale_log(&self, delta: f64) -> Quantity {
        Quantity {
            log_magnitude: self.log_magnitude + delta,
            dim: self.dim.clone(),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = format_magnitude(self.magnitude());
        if self.dim.is_dimensionless() {
            write!(f, "{m}")
        } else {
            write!(f, "{m} {}", self.dim)
        }
    }
}

/// Decimal rendering with 15 significant digits and trailing zeros trimmed.
pub fn format_magnitude(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp10 = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp10) {
        let decimals = (14 - exp10).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.14e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exponent}")
    }
}

/// A fixed-coefficient monomial map `(x_1..x_k) -> x_1^c_1 ... x_k^c_k`,
/// identified with its coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fclcf {
    coefficients: Vec<Rational>,
}

impl Fclcf {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        Fclcf { coefficients }
    }

    /// The 0-input map, whose only value is 1.
    pub fn empty() -> Self {
        Fclcf {
            coefficients: Vec::new(),
        }
    }

    /// Projection onto input `i` of `n`.
    pub fn projection(n: usize, i: usize) -> Self {
        let mut c = vec![Rational::zero(); n];
        c[i] = Rational::one();
        Fclcf { coefficients: c }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Fclcf::new(
            coefficients
                .iter()
                .map(|&c| crate::exactlin::int(c))
                .collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Rational> {
        self.coefficients
    }

    fn check_arity(&self, found: usize) -> Result<(), SettingError> {
        if found != self.arity() {
            return Err(SettingError::Arity {
                expected: self.arity(),
                found,
            });
        }
        Ok(())
    }

    /// Renders as `x^-1*y*z^2` over the given input names; `1` when constant.
    pub fn display_with(&self, names: &[String]) -> String {
        let factors: Vec<String> = names
            .iter()
            .zip(&self.coefficients)
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| format_power(n, c))
            .collect();
        if factors.is_empty() {
            "1".into()
        } else {
            factors.join("*")
        }
    }

    /// Coefficient strings, `p` or `p/q`.
    pub fn exponent_strings(&self) -> Vec<String> {
        self.coefficients.iter().map(fmt_rational).collect()
    }

    pub fn has_negative(&self) -> bool {
        self.coefficients.iter().any(Signed::is_negative)
    }
}

/// The dimension of a quantity.
pub fn project(x: &Quantity) -> DimVector {
    x.dim.clone()
}

/// Applies `p` to quantities: magnitudes multiply under powers, dimensions add.
/// The 0-input map yields the dimensionless 1 of `system`.
pub fn qty_combine(
    system: &Arc<DimSystem>,
    p: &Fclcf,
    xs: &[Quantity],
) -> Result<Quantity, SettingError> {
    p.check_arity(xs.len())?;
    let mut log = 0.0;
    let mut dim = DimVector::zero(system);
    for (c, x) in p.coefficients.iter().zip(xs) {
        if x.system() != system {
            return Err(SettingError::SystemMismatch);
        }
        if c.is_zero() {
            continue;
        }
        log += to_f64(c) * x.log_magnitude;
        dim = dim.mul(&x.dim.pow(c))?;
    }
    Ok(Quantity {
        log_magnitude: log,
        dim,
    })
}

/// Applies `p` to dimensions only; exact.
pub fn dim_combine(
    system: &Arc<DimSystem>,
    p: &Fclcf,
    ws: &[DimVector],
) -> Result<DimVector, SettingError> {
    p.check_arity(ws.len())?;
    let mut dim = DimVector::zero(system);
    for (c, w) in p.coefficients.iter().zip(ws) {
        dim = dim.mul(&w.pow(c))?;
    }
    Ok(dim)
}

/// The unique positive real `a` with `a * s = x`.
pub fn coordinate(x: &Quantity, s: &Quantity) -> Result<f64, SettingError> {
    if x.dim != s.dim {
        return Err(SettingError::DimensionMismatch {
            expected: s.dim.to_string(),
            found: x.dim.to_string(),
        });
    }
    Ok((x.log_magnitude - s.log_magnitude).exp())
}

/// Log of [`coordinate`], without the round trip through `exp`.
pub fn log_coordinate(x: &Quantity, s: &Quantity) -> Result<f64, SettingError> {
    coordinate(x, s).map(|_| x.log_magnitude - s.log_magnitude)
}

/// The `d x n` matrix whose column `i` holds the exponents of `ws[i]`.
pub fn dimension_matrix(
    system: &Arc<DimSystem>,
    ws: &[DimVector],
) -> Result<QMatrix, SettingError> {
    let mut m = QMatrix::zeros(system.len(), ws.len());
    for (i, w) in ws.iter().enumerate() {
        if w.system() != system {
            return Err(SettingError::SystemMismatch);
        }
        for (j, e) in w.exponents.iter().enumerate() {
            m[(j, i)] = e.clone();
        }
    }
    Ok(m)
}
