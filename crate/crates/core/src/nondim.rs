//! Pi-values, the equivalence of variable tuples, and nondimensionalization.
//!
//! Two tuples of the same dimensions are equivalent when one is obtained
//! from the other by changing the consistent list of units they are measured
//! in. The classes are exactly the fibers of the pi-value map, which is what
//! [`equivalent`] decides. [`nondimensionalize`] turns an invariant relation
//! `f` on the variables into a relation `g` on the pi-values by evaluating
//! `f` on a preimage built from a special basis.

use thiserror::Error;

use crate::pigroups::{PiBasis, SpecialPiBasis};
use crate::quantity::{log_coordinate, qty_combine, Quantity, SettingError};
use crate::units::{is_consistent, UnitError};

/// Default tolerance on log pi-values.
pub const EQUIV_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NondimError {
    #[error("slot {index}: expected dimension {expected}, found {found}")]
    DimMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("expected {expected} values, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("reference list is not consistent: {0}")]
    InconsistentReference(String),
    #[error("relation failed: {0}")]
    Relation(String),
    #[error(transparent)]
    Setting(#[from] SettingError),
}

/// A relation on a fixed list of variables.
pub trait Relation {
    fn holds(&self, xs: &[Quantity]) -> Result<bool, NondimError>;
}

impl<F> Relation for F
where
    F: Fn(&[Quantity]) -> bool,
{
    fn holds(&self, xs: &[Quantity]) -> Result<bool, NondimError> {
        Ok(self(xs))
    }
}

impl Relation for crate::dsl::Problem {
    fn holds(&self, xs: &[Quantity]) -> Result<bool, NondimError> {
        self.eval(xs, crate::dsl::EvalOptions::default())
            .map_err(|e| NondimError::Relation(e.to_string()))
    }
}

/// Values of the groups of a basis, stored as natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct PiValues {
    logs: Vec<f64>,
}

impl PiValues {
    pub fn from_logs(logs: Vec<f64>) -> Self {
        PiValues { logs }
    }

    /// From positive values.
    pub fn from_values(values: &[f64]) -> Self {
        PiValues {
            logs: values.iter().map(|v| v.ln()).collect(),
        }
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn values(&self) -> Vec<f64> {
        self.logs.iter().map(|l| l.exp()).collect()
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }
}

fn check_dims(basis: &PiBasis, xs: &[Quantity]) -> Result<(), NondimError> {
    if xs.len() != basis.n() {
        return Err(NondimError::Arity {
            expected: basis.n(),
            found: xs.len(),
        });
    }
    for (i, (x, w)) in xs.iter().zip(basis.dims()).enumerate() {
        if x.dim() != w {
            return Err(NondimError::DimMismatch {
                index: i,
                expected: w.to_string(),
                found: x.dim().to_string(),
            });
        }
    }
    Ok(())
}

pub fn pi_values(basis: &PiBasis, xs: &[Quantity]) -> Result<PiValues, NondimError> {
    check_dims(basis, xs)?;
    let logs = basis
        .groups()
        .iter()
        .map(|g| qty_combine(basis.system(), g, xs).map(|q| q.log_magnitude()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PiValues { logs })
}

fn require_consistent(reference: &[Quantity], tol: f64) -> Result<(), NondimError> {
    match is_consistent(reference, tol) {
        Ok(r) if r.consistent => Ok(()),
        Ok(r) => {
            let w = r.witness.expect("inconsistent report carries a witness");
            let names: Vec<String> = (1..=reference.len()).map(|i| format!("s{i}")).collect();
            Err(NondimError::InconsistentReference(format!(
                "{} = {}",
                w.combination.display_with(&names),
                w.clash_factor
            )))
        }
        Err(UnitError::Setting(e)) => Err(e.into()),
        Err(e) => Err(NondimError::InconsistentReference(e.to_string())),
    }
}

/// The coordinates of `xs` relative to the consistent list `s`, slot by slot.
pub fn strip_units(s: &[Quantity], xs: &[Quantity], tol: f64) -> Result<Vec<f64>, NondimError> {
    require_consistent(s, tol)?;
    if s.len() != xs.len() {
        return Err(NondimError::Arity {
            expected: s.len(),
            found: xs.len(),
        });
    }
    s.iter()
        .zip(xs)
        .enumerate()
        .map(|(i, (si, xi))| {
            log_coordinate(xi, si)
                .map(f64::exp)
                .map_err(|_| NondimError::DimMismatch {
                    index: i,
                    expected: si.dim().to_string(),
                    found: xi.dim().to_string(),
                })
        })
        .collect()
}

/// Inverse of [`strip_units`]: `v_i * s_i`.
pub fn embed(s: &[Quantity], coords: &[f64]) -> Result<Vec<Quantity>, NondimError> {
    if s.len() != coords.len() {
        return Err(NondimError::Arity {
            expected: s.len(),
            found: coords.len(),
        });
    }
    s.iter()
        .zip(coords)
        .map(|(si, &v)| {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SettingError::NonPositive(v).into());
            }
            Ok(si.scale_log(v.ln()))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceReason {
    Equivalent,
    /// First slot whose dimensions differ.
    DimMismatch(usize),
    /// First group whose values differ.
    PiMismatch(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub reason: EquivalenceReason,
}

impl EquivalenceVerdict {
    fn of(reason: EquivalenceReason) -> Self {
        EquivalenceVerdict {
            equivalent: reason == EquivalenceReason::Equivalent,
            reason,
        }
    }
}

/// Decides whether `ys` is a unit-change image of `xs`: same dimensions slot
/// by slot and equal pi-values within `tol` on logs.
pub fn equivalent(
    basis: &PiBasis,
    xs: &[Quantity],
    ys: &[Quantity],
    tol: f64,
) -> EquivalenceVerdict {
    let n = basis.n();
    for i in 0..n {
        match (xs.get(i), ys.get(i)) {
            (Some(x), Some(y)) if x.dim() == &basis.dims()[i] && y.dim() == x.dim() => {}
            _ => return EquivalenceVerdict::of(EquivalenceReason::DimMismatch(i)),
        }
    }
    if xs.len() != n || ys.len() != n {
        return EquivalenceVerdict::of(EquivalenceReason::DimMismatch(n));
    }
    let px = pi_values(basis, xs).expect("dimensions checked");
    let py = pi_values(basis, ys).expect("dimensions checked");
    for (i, (a, b)) in px.logs.iter().zip(&py.logs).enumerate() {
        if (a - b).abs() > tol {
            return EquivalenceVerdict::of(EquivalenceReason::PiMismatch(i));
        }
    }
    EquivalenceVerdict::of(EquivalenceReason::Equivalent)
}

/// The point of the fiber over `values` built from `reference`: pivot slots
/// copy the reference, free slot `l_i` is `v_i / u_i * c_{l_i}` where
/// `u_i` is group `i` evaluated at the reference.
fn preimage(
    sb: &SpecialPiBasis,
    reference: &[Quantity],
    ref_logs: &[f64],
    values: &[f64],
) -> Vec<Quantity> {
    let mut out = reference.to_vec();
    for ((&l, &v), &u) in sb.free_indices().iter().zip(values).zip(ref_logs) {
        out[l] = reference[l].scale_log(v - u);
    }
    out
}

fn reference_logs(sb: &SpecialPiBasis, reference: &[Quantity]) -> Result<Vec<f64>, NondimError> {
    Ok(pi_values(sb.basis(), reference)?.logs)
}

/// The member of the class of `xs` whose pivot coordinates relative to
/// `reference` are all 1.
pub fn canonical_rep(
    sb: &SpecialPiBasis,
    reference: &[Quantity],
    xs: &[Quantity],
    tol: f64,
) -> Result<Vec<Quantity>, NondimError> {
    check_dims(sb.basis(), reference)?;
    require_consistent(reference, tol)?;
    let v = pi_values(sb.basis(), xs)?;
    let u = reference_logs(sb, reference)?;
    Ok(preimage(sb, reference, &u, &v.logs))
}

/// `g(v_1..v_r) = f(preimage of v)`, the dimensionless form of `f`.
pub struct Nondimensionalized<'a, R: ?Sized> {
    relation: &'a R,
    sb: SpecialPiBasis,
    reference: Vec<Quantity>,
    ref_logs: Vec<f64>,
}

impl<R: Relation + ?Sized> Nondimensionalized<'_, R> {
    pub fn arity(&self) -> usize {
        self.sb.free_indices().len()
    }

    pub fn special_basis(&self) -> &SpecialPiBasis {
        &self.sb
    }

    /// Evaluates `g` at pi-values given as logs.
    pub fn holds_logs(&self, logs: &[f64]) -> Result<bool, NondimError> {
        if logs.len() != self.arity() {
            return Err(NondimError::Arity {
                expected: self.arity(),
                found: logs.len(),
            });
        }
        self.relation
            .holds(&preimage(&self.sb, &self.reference, &self.ref_logs, logs))
    }

    pub fn holds(&self, values: &PiValues) -> Result<bool, NondimError> {
        self.holds_logs(values.logs())
    }

    /// Evaluates `g` at the pi-values (in this special basis) of `xs`, which
    /// equals `f(xs)` whenever `f` is dimensionally invariant.
    pub fn recompose(&self, xs: &[Quantity]) -> Result<bool, NondimError> {
        let v = pi_values(self.sb.basis(), xs)?;
        self.holds(&v)
    }
}

pub fn nondimensionalize<'a, R: Relation + ?Sized>(
    f: &'a R,
    sb: &SpecialPiBasis,
    reference: &[Quantity],
    tol: f64,
) -> Result<Nondimensionalized<'a, R>, NondimError> {
    check_dims(sb.basis(), reference)?;
    require_consistent(reference, tol)?;
    let ref_logs = reference_logs(sb, reference)?;
    Ok(Nondimensionalized {
        relation: f,
        sb: sb.clone(),
        reference: reference.to_vec(),
        ref_logs,
    })
}

/// Indicator of the class of a fixed tuple.
pub struct FiberIndicator {
    pub basis: PiBasis,
    pub center: Vec<Quantity>,
    pub tol: f64,
}

impl Relation for FiberIndicator {
    fn holds(&self, xs: &[Quantity]) -> Result<bool, NondimError> {
        Ok(equivalent(&self.basis, &self.center, xs, self.tol).equivalent)
    }
}
