//! Randomized dimensional-invariance testing.
//!
//! A relation is dimensionally invariant when its truth value does not depend
//! on which consistent system of units the variables are measured in. That
//! is the same as being unchanged under every rescaling of the fundamental
//! units, which is what [`fuzz_invariance`] samples. A failing trial is a
//! definitive counterexample; a clean run is only evidence.

use std::sync::Arc;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dsl::{CmpOp, DslError, EvalOptions, Evaluated, Expr, Problem};
use crate::exactlin::{rref, to_f64};
use crate::quantity::{dimension_matrix, format_magnitude, DimSystem, Quantity, SettingError};

/// Magnitude range for drawn bindings.
pub const BINDING_RANGE: (f64, f64) = (1e-3, 1e3);
/// Range for drawn fundamental rescaling factors.
pub const FACTOR_RANGE: (f64, f64) = (1e-2, 1e2);
/// Rounds of factor bisection applied to a counterexample.
pub const SHRINK_ROUNDS: usize = 20;
/// Residual bound for [`oracle_equivalent`].
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("problem spec: {0}")]
    Spec(#[from] DslError),
    #[error("slot {0}: dimensions differ")]
    DimMismatch(usize),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Setting(#[from] SettingError),
}

/// A positive factor per fundamental dimension, stored as logs.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaling {
    system: Arc<DimSystem>,
    log_factors: Vec<f64>,
}

impl Rescaling {
    pub fn new(system: &Arc<DimSystem>, factors: &[f64]) -> Result<Self, SettingError> {
        if factors.len() != system.len() {
            return Err(SettingError::Arity {
                expected: system.len(),
                found: factors.len(),
            });
        }
        if let Some(&bad) = factors.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
            return Err(SettingError::NonPositive(bad));
        }
        Ok(Rescaling {
            system: Arc::clone(system),
            log_factors: factors.iter().map(|f| f.ln()).collect(),
        })
    }

    pub fn from_logs(system: &Arc<DimSystem>, log_factors: Vec<f64>) -> Result<Self, SettingError> {
        if log_factors.len() != system.len() {
            return Err(SettingError::Arity {
                expected: system.len(),
                found: log_factors.len(),
            });
        }
        if log_factors.iter().any(|l| !l.is_finite()) {
            return Err(SettingError::NonPositive(0.0));
        }
        Ok(Rescaling {
            system: Arc::clone(system),
            log_factors,
        })
    }

    pub fn identity(system: &Arc<DimSystem>) -> Self {
        Rescaling {
            system: Arc::clone(system),
            log_factors: vec![0.0; system.len()],
        }
    }

    pub fn system(&self) -> &Arc<DimSystem> {
        &self.system
    }

    pub fn log_factors(&self) -> &[f64] {
        &self.log_factors
    }

    pub fn factors(&self) -> Vec<f64> {
        self.log_factors.iter().map(|l| l.exp()).collect()
    }
}

/// Multiplies each quantity by `prod_j factor_j ^ exponent_j` of its dimension.
pub fn rescale(xs: &[Quantity], r: &Rescaling) -> Result<Vec<Quantity>, SettingError> {
    xs.iter()
        .map(|x| {
            if x.system() != &r.system {
                return Err(SettingError::SystemMismatch);
            }
            let delta: f64 = x
                .dim()
                .exponents()
                .iter()
                .zip(&r.log_factors)
                .map(|(e, l)| to_f64(e) * l)
                .sum();
            Ok(x.scale_log(delta))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    /// Comparison tolerance used when evaluating the relation.
    pub tol: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 1000,
            seed: 0,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BindingRecord {
    pub magnitude: String,
    pub dim: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub bindings: IndexMap<String, BindingRecord>,
    pub factors: IndexMap<String, String>,
    pub before: bool,
    pub after: bool,
    #[serde(skip)]
    pub binding_values: Vec<Quantity>,
    #[serde(skip)]
    pub rescaling: Option<Rescaling>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub trials: usize,
    pub passed: usize,
    pub seed: u64,
    pub counterexample: Option<Counterexample>,
    pub note: &'static str,
}

const ONE_SIDED_NOTE: &str =
    "a counterexample is definitive; passing trials are evidence, not proof";

impl InvarianceReport {
    pub fn all_passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(trial as u64)))
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo.ln()..hi.ln())
}

/// Equalities `var = expr` (either orientation) among the top-level
/// conjuncts, with `var` not occurring in `expr`.
fn solvable_equalities(e: &Expr) -> Vec<(String, Expr)> {
    let mut out = Vec::new();
    let mut stack = vec![e];
    while let Some(e) = stack.pop() {
        match e {
            Expr::And(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            Expr::Cmp(CmpOp::Eq, a, b) => {
                for (lhs, rhs) in [(a, b), (b, a)] {
                    if let Expr::Var(v) = lhs.as_ref() {
                        if !rhs.variables().contains(v) && !out.iter().any(|(n, _)| n == v) {
                            out.push((v.clone(), rhs.as_ref().clone()));
                            break;
                        }
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Overwrites solvable variables so that their equalities hold.
fn seed_equalities(
    problem: &Problem,
    xs: &mut [Quantity],
    eqs: &[(String, Expr)],
    opts: EvalOptions,
) {
    for (var, rhs) in eqs {
        let Some(i) = problem.names().iter().position(|n| n == var) else {
            continue;
        };
        let Ok(Evaluated::Number(n)) = problem.evaluate_expr(rhs, xs, opts) else {
            continue;
        };
        let Some(q) = n.to_quantity() else {
            continue;
        };
        if problem.is_numeric() {
            if let Ok(q) = Quantity::from_log(q.log_magnitude(), problem.dims()[i].clone()) {
                xs[i] = q;
            }
        } else if q.dim() == &problem.dims()[i] {
            xs[i] = q;
        }
    }
}

struct Trial {
    before: bool,
    after: bool,
    bindings: Vec<Quantity>,
    rescaling: Rescaling,
}

fn run_trial(
    problem: &Problem,
    eqs: &[(String, Expr)],
    cfg: &FuzzConfig,
    index: usize,
) -> Result<Trial, HarnessError> {
    let mut rng = trial_rng(cfg.seed, index);
    let mut bindings: Vec<Quantity> = problem
        .dims()
        .iter()
        .map(|d| Quantity::from_log(log_uniform(&mut rng, BINDING_RANGE), d.clone()))
        .collect::<Result<_, _>>()?;
    let system = problem.system();
    let log_factors = (0..system.len())
        .map(|_| log_uniform(&mut rng, FACTOR_RANGE))
        .collect();
    let rescaling = Rescaling::from_logs(system, log_factors)?;
    let opts = EvalOptions { tol: cfg.tol };
    // Even trials start from a point satisfying the relation's equalities,
    // odd trials from an unconstrained draw.
    if index.is_multiple_of(2) && !eqs.is_empty() {
        seed_equalities(problem, &mut bindings, eqs, opts);
    }
    let before = problem.eval(&bindings, opts)?;
    let after = problem.eval(&rescale(&bindings, &rescaling)?, opts)?;
    Ok(Trial {
        before,
        after,
        bindings,
        rescaling,
    })
}

fn violates(
    problem: &Problem,
    xs: &[Quantity],
    r: &Rescaling,
    opts: EvalOptions,
) -> Result<bool, HarnessError> {
    let before = problem.eval(xs, opts)?;
    let after = problem.eval(&rescale(xs, r)?, opts)?;
    Ok(before != after)
}

/// Bisects each factor toward 1 in log space while the violation persists.
pub fn shrink(
    problem: &Problem,
    xs: &[Quantity],
    r: &Rescaling,
    opts: EvalOptions,
) -> Result<Rescaling, HarnessError> {
    let mut best = r.clone();
    for _ in 0..SHRINK_ROUNDS {
        let mut changed = false;
        for j in 0..best.log_factors.len() {
            if best.log_factors[j] == 0.0 {
                continue;
            }
            let mut cand = best.clone();
            cand.log_factors[j] /= 2.0;
            if violates(problem, xs, &cand, opts)? {
                best = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(best)
}

/// Runs `cfg.trials` independent trials. Each draws log-uniform bindings and
/// a log-uniform rescaling from a generator derived from `(seed, trial)`,
/// and passes iff the relation has the same truth value before and after
/// rescaling. The first failure by trial index is shrunk and reported.
pub fn fuzz_invariance(
    problem: &Problem,
    cfg: &FuzzConfig,
) -> Result<InvarianceReport, HarnessError> {
    if cfg.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let eqs = solvable_equalities(problem.relation());
    let outcomes: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(problem, &eqs, cfg, i))
        .collect::<Result<_, _>>()?;
    let passed = outcomes.iter().filter(|t| t.before == t.after).count();
    let counterexample = match outcomes.iter().position(|t| t.before != t.after) {
        None => None,
        Some(index) => {
            let t = &outcomes[index];
            let opts = EvalOptions { tol: cfg.tol };
            let shrunk = shrink(problem, &t.bindings, &t.rescaling, opts)?;
            let after = problem.eval(&rescale(&t.bindings, &shrunk)?, opts)?;
            Some(counterexample_record(
                problem,
                index,
                &t.bindings,
                &shrunk,
                t.before,
                after,
            ))
        }
    };
    Ok(InvarianceReport {
        trials: cfg.trials,
        passed,
        seed: cfg.seed,
        counterexample,
        note: ONE_SIDED_NOTE,
    })
}

fn counterexample_record(
    problem: &Problem,
    trial: usize,
    xs: &[Quantity],
    r: &Rescaling,
    before: bool,
    after: bool,
) -> Counterexample {
    let bindings = problem
        .names()
        .iter()
        .zip(xs)
        .map(|(n, q)| {
            (
                n.clone(),
                BindingRecord {
                    magnitude: format_magnitude(q.magnitude()),
                    dim: q.dim().to_string(),
                },
            )
        })
        .collect();
    let factors = problem
        .system()
        .names()
        .iter()
        .zip(r.factors())
        .map(|(n, f)| (n.clone(), format_magnitude(f)))
        .collect();
    Counterexample {
        trial,
        bindings,
        factors,
        before,
        after,
        binding_values: xs.to_vec(),
        rescaling: Some(r.clone()),
    }
}

/// Independent equivalence check: `ys` is a rescaling of `xs` iff the vector
/// of log-ratios lies in the row space of the dimension matrix. The row
/// space comes from the exact RREF; the projection is done in floating point
/// and the residual compared against [`ORACLE_TOL`].
pub fn oracle_equivalent(xs: &[Quantity], ys: &[Quantity]) -> Result<bool, HarnessError> {
    oracle_residual(xs, ys).map(|r| r <= ORACLE_TOL)
}

/// Norm of the component of the log-ratio vector orthogonal to the row space.
pub fn oracle_residual(xs: &[Quantity], ys: &[Quantity]) -> Result<f64, HarnessError> {
    if xs.len() != ys.len() {
        return Err(HarnessError::DimMismatch(xs.len().min(ys.len())));
    }
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        if x.dim() != y.dim() {
            return Err(HarnessError::DimMismatch(i));
        }
    }
    let Some(first) = xs.first() else {
        return Ok(0.0);
    };
    let dims: Vec<_> = xs.iter().map(|x| x.dim().clone()).collect();
    let a = dimension_matrix(first.system(), &dims)?;
    let reduced = rref(&a);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(reduced.rank);
    for i in 0..reduced.rank {
        let mut v: Vec<f64> = reduced.reduced.row(i).iter().map(to_f64).collect();
        // Two passes of Gram-Schmidt.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
            }
        }
        let norm = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|vi| *vi /= norm);
        basis.push(v);
    }
    let mut d: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y.log_magnitude() - x.log_magnitude())
        .collect();
    for _ in 0..2 {
        for q in &basis {
            let c = dot(&d, q);
            d.iter_mut().zip(q).for_each(|(di, qi)| *di -= c * qi);
        }
    }
    Ok(dot(&d, &d).sqrt())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
