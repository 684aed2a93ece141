//! Unit registries and the consistency test for lists of units.
//!
//! A list of units is consistent when no product of powers of them is
//! dimensionless without also being exactly 1. Equivalently, every unit in
//! the list lies in the span of some units with independent dimensions.
//! Magnitudes enter from decimal literals, so "exactly 1" is checked in log
//! space against a tolerance.

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{parse_dimension, DslError};
use crate::exactlin::{kernel_basis, rref, solve, LinError, QMatrix};
use crate::quantity::{
    dim_combine, dimension_matrix, qty_combine, DimSystem, DimVector, Fclcf, Quantity, SettingError,
};

/// Largest `|log product|` of a dimensionless combination still treated as 1.
pub const CLASH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("empty unit list")]
    EmptyList,
    #[error("inconsistent units: {0} is dimensionless but equals {1}")]
    Inconsistent(String, f64),
    #[error("target {0} is outside the span of the base dimensions")]
    NoSolution(usize),
    #[error("base dimensions are linearly dependent")]
    DependentBase,
    #[error("target {index} has the right dimension but is off by a factor {factor}")]
    MagnitudeMismatch { index: usize, factor: f64 },
    #[error("registry: {0}")]
    Registry(String),
    #[error(transparent)]
    Setting(#[from] SettingError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegistryFile {
    system: Vec<String>,
    units: IndexMap<String, UnitEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct UnitEntry {
    magnitude: String,
    dim: String,
}

/// Named units, each a quantity expressed in the registry's coherent
/// reference system.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRegistry {
    system: Arc<DimSystem>,
    entries: IndexMap<String, Quantity>,
}

impl UnitRegistry {
    pub fn new(system: &Arc<DimSystem>) -> Self {
        UnitRegistry {
            system: Arc::clone(system),
            entries: IndexMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, UnitError> {
        let file: RegistryFile =
            serde_json::from_str(text).map_err(|e| UnitError::Registry(e.to_string()))?;
        let system = DimSystem::new(&file.system)?;
        let mut reg = UnitRegistry::new(&system);
        for (name, entry) in file.units {
            let magnitude: f64 = entry.magnitude.trim().parse().map_err(|_| {
                UnitError::Registry(format!(
                    "unit '{name}': bad magnitude '{}'",
                    entry.magnitude
                ))
            })?;
            let dim = parse_dimension(&entry.dim, &system)
                .map_err(|e: DslError| UnitError::Registry(format!("unit '{name}': {e}")))?;
            let q = Quantity::new(magnitude, dim)?;
            reg.insert(&name, q)?;
        }
        Ok(reg)
    }

    pub fn load(path: &Path) -> Result<Self, UnitError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UnitError::Registry(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn insert(&mut self, name: &str, q: Quantity) -> Result<(), UnitError> {
        if !crate::quantity::is_identifier(name) {
            return Err(UnitError::Registry(format!(
                "'{name}' is not a valid unit name"
            )));
        }
        if q.system() != &self.system {
            return Err(UnitError::Setting(SettingError::SystemMismatch));
        }
        if self.entries.contains_key(name) {
            return Err(UnitError::Registry(format!("duplicate unit '{name}'")));
        }
        self.entries.insert(name.to_string(), q);
        Ok(())
    }

    pub fn system(&self) -> &Arc<DimSystem> {
        &self.system
    }

    pub fn get(&self, name: &str) -> Option<&Quantity> {
        self.entries.get(name)
    }

    /// Looks up several names at once.
    pub fn lookup_all<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Quantity>, UnitError> {
        names
            .iter()
            .map(|n| {
                self.get(n.as_ref())
                    .cloned()
                    .ok_or_else(|| UnitError::Registry(format!("unknown unit '{}'", n.as_ref())))
            })
            .collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A dimensionless product of powers of the units that is not 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Clash {
    pub combination: Fclcf,
    pub clash_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub witness: Option<Clash>,
}

fn common_system(units: &[Quantity]) -> Result<Arc<DimSystem>, UnitError> {
    let first = units.first().ok_or(UnitError::EmptyList)?;
    let system = Arc::clone(first.system());
    if units.iter().any(|u| u.system() != &system) {
        return Err(SettingError::SystemMismatch.into());
    }
    Ok(system)
}

fn dims_of(units: &[Quantity]) -> Vec<DimVector> {
    units.iter().map(|u| u.dim().clone()).collect()
}

/// Checks every kernel vector of the dimension matrix; the list is
/// consistent iff each such combination has magnitude 1 within `tol` in log
/// space. Checking a kernel basis suffices because the log of a combination
/// is linear in its coefficients.
pub fn is_consistent(units: &[Quantity], tol: f64) -> Result<ConsistencyReport, UnitError> {
    let system = common_system(units)?;
    let a = dimension_matrix(&system, &dims_of(units))?;
    for v in kernel_basis(&a) {
        let p = Fclcf::new(v);
        let q = qty_combine(&system, &p, units)?;
        if q.log_magnitude().abs() > tol {
            return Ok(ConsistencyReport {
                consistent: false,
                witness: Some(Clash {
                    combination: p,
                    clash_factor: q.magnitude(),
                }),
            });
        }
    }
    Ok(ConsistencyReport {
        consistent: true,
        witness: None,
    })
}

fn require_consistent(units: &[Quantity], tol: f64) -> Result<Arc<DimSystem>, UnitError> {
    let report = is_consistent(units, tol)?;
    if let Some(w) = report.witness {
        let names: Vec<String> = (1..=units.len()).map(|i| format!("u{i}")).collect();
        return Err(UnitError::Inconsistent(
            w.combination.display_with(&names),
            w.clash_factor,
        ));
    }
    common_system(units)
}

/// Indices of the first maximal subfamily with independent dimensions.
pub fn fundamental_indices(units: &[Quantity]) -> Result<Vec<usize>, UnitError> {
    let system = common_system(units)?;
    let a = dimension_matrix(&system, &dims_of(units))?;
    Ok(rref(&a).pivot_cols)
}

/// Units with independent dimensions spanning the same space as `units`,
/// taken in input order.
pub fn fundamental_basis(units: &[Quantity], tol: f64) -> Result<Vec<Quantity>, UnitError> {
    require_consistent(units, tol)?;
    Ok(fundamental_indices(units)?
        .into_iter()
        .map(|i| units[i].clone())
        .collect())
}

/// Expresses each target as a monomial in `base`. The base dimensions must
/// be independent, which makes the coefficients unique.
pub fn express(base: &[Quantity], targets: &[Quantity], tol: f64) -> Result<Vec<Fclcf>, UnitError> {
    let system = common_system(base)?;
    let a = dimension_matrix(&system, &dims_of(base))?;
    if rref(&a).rank < base.len() {
        return Err(UnitError::DependentBase);
    }
    targets
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.system() != &system {
                return Err(SettingError::SystemMismatch.into());
            }
            let coeffs = match solve(&a, t.dim().exponents()) {
                Ok(c) => c,
                Err(LinError::NoSolution) => return Err(UnitError::NoSolution(i)),
                Err(e) => unreachable!("dimension matrix shape is fixed: {e}"),
            };
            let p = Fclcf::new(coeffs);
            debug_assert_eq!(&dim_combine(&system, &p, &dims_of(base))?, t.dim());
            let q = qty_combine(&system, &p, base)?;
            let residual = t.log_magnitude() - q.log_magnitude();
            if residual.abs() > tol {
                return Err(UnitError::MagnitudeMismatch {
                    index: i,
                    factor: residual.exp(),
                });
            }
            Ok(p)
        })
        .collect()
}

/// The dimension matrix of a unit list; exposed for diagnostics.
pub fn unit_matrix(units: &[Quantity]) -> Result<QMatrix, UnitError> {
    let system = common_system(units)?;
    Ok(dimension_matrix(&system, &dims_of(units))?)
}
