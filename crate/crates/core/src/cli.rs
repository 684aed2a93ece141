//! The `piforge` command line.
//!
//! Exit codes: 0 for success, 1 for a domain negative (inconsistent units,
//! an invariance violation, inequivalent bindings, an inhomogeneous
//! relation), 2 for usage and parse failures.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::dsl::{DslError, Problem, ProblemSpec, Type};
use crate::harness::{fuzz_invariance, FuzzConfig};
use crate::nondim::{canonical_rep, equivalent, nondimensionalize, pi_values, EquivalenceReason};
use crate::pigroups::{pi_basis, special_basis, transition, PiBasis};
use crate::quantity::{format_magnitude, Fclcf, Quantity};
use crate::units::{is_consistent, UnitRegistry};

pub const REGISTRY_ENV: &str = "PIFORGE_REGISTRY";

const R_ZERO_MESSAGE: &str = "r = 0: relation is determined up to a dimensionless constant set";

#[derive(Debug, Parser)]
#[command(name = "piforge", version, about = "Exact dimensional analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Unit registry JSON. Overrides the spec's own registry; falls back to
    /// $PIFORGE_REGISTRY.
    #[arg(long, global = true, value_name = "PATH")]
    pub registry: Option<PathBuf>,
    /// Tolerance for comparisons, consistency and equivalence checks.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_f64)]
    pub tol: f64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the canonical and special pi-group bases of a problem.
    Pi {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
    },
    /// Check whether a list of registry units is consistent.
    Consistent {
        #[arg(required = true, value_name = "UNIT")]
        units: Vec<String>,
    },
    /// Fuzz a relation for invariance under rescaling of the fundamental units.
    Verify {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether two bindings differ only by a change of units.
    Equiv {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        /// Bindings such as "m=2 kg, t=3 s".
        #[arg(long, value_name = "BINDINGS")]
        a: String,
        #[arg(long, value_name = "BINDINGS")]
        b: String,
    },
    /// Pi values, canonical representative and dimensionless relation value.
    Nondim {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        #[arg(long, value_name = "BINDINGS")]
        at: String,
    },
    /// Type-check a relation against the declared dimensions.
    Check {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

/// Outcome of a subcommand before it is written out.
struct Outcome {
    code: i32,
    text: String,
    json: Value,
}

impl Outcome {
    fn new(code: i32, text: String, json: Value) -> Self {
        Outcome { code, text, json }
    }
}

/// Usage or parse failure (exit 2).
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let registry_env = std::env::var_os(REGISTRY_ENV).map(PathBuf::from);
    match execute(&cli, registry_env.as_deref()) {
        Ok(o) => {
            let body = if cli.global.json {
                serde_json::to_string_pretty(&o.json).expect("json values serialize")
            } else {
                o.text.trim_end().to_string()
            };
            let _ = writeln!(out, "{body}");
            o.code
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn execute(cli: &Cli, registry_env: Option<&Path>) -> Result<Outcome, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Pi { spec } => cmd_pi(&load_problem(spec, g, registry_env)?),
        Command::Consistent { units } => {
            let path = g.registry.as_deref().or(registry_env).ok_or_else(|| {
                Failure(format!(
                    "a registry is required (--registry or ${REGISTRY_ENV})"
                ))
            })?;
            cmd_consistent(&UnitRegistry::load(path)?, units, g.tol)
        }
        Command::Verify { spec, trials, seed } => {
            let problem = load_problem(spec, g, registry_env)?;
            let cfg = FuzzConfig {
                trials: usize::try_from(*trials)?,
                seed: *seed,
                tol: g.tol,
            };
            cmd_verify(&problem, &cfg)
        }
        Command::Equiv { spec, a, b } => {
            cmd_equiv(&load_problem(spec, g, registry_env)?, a, b, g.tol)
        }
        Command::Nondim { spec, at } => {
            cmd_nondim(&load_problem(spec, g, registry_env)?, at, g.tol)
        }
        Command::Check { spec } => cmd_check(&read_spec(spec, g, registry_env)?, spec),
    }
}

/// Reads a spec file and applies registry precedence: `--registry`, then the
/// spec's own field, then the environment.
fn read_spec(
    path: &Path,
    g: &GlobalOpts,
    registry_env: Option<&Path>,
) -> Result<ProblemSpec, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let mut spec: ProblemSpec =
        serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let cwd = std::env::current_dir()?;
    if let Some(r) = &g.registry {
        spec.registry = Some(cwd.join(r).to_string_lossy().into_owned());
    } else if spec.registry.is_none() {
        if let Some(r) = registry_env {
            spec.registry = Some(cwd.join(r).to_string_lossy().into_owned());
        }
    }
    Ok(spec)
}

fn load_problem(
    path: &Path,
    g: &GlobalOpts,
    registry_env: Option<&Path>,
) -> Result<Problem, Failure> {
    let spec = read_spec(path, g, registry_env)?;
    Ok(Problem::from_spec(&spec, path.parent())?)
}

fn rationals_json(p: &Fclcf) -> Value {
    json!(p.exponent_strings())
}

fn group_line(i: usize, g: &Fclcf, names: &[String]) -> String {
    format!(
        "  pi{} = {}    ({})\n",
        i + 1,
        g.display_with(names),
        g.exponent_strings().join(", ")
    )
}

fn variables_json(problem: &Problem) -> Value {
    Value::Object(
        problem
            .names()
            .iter()
            .zip(problem.dims())
            .map(|(n, d)| (n.clone(), json!(d.to_string())))
            .collect(),
    )
}

fn cmd_pi(problem: &Problem) -> Result<Outcome, Failure> {
    let names = problem.names();
    let canonical = pi_basis(problem.dims())?;
    let special = special_basis(problem.dims())?;
    let (n, rank, r) = (canonical.n(), canonical.rank(), canonical.r());
    let pick = |idx: &[usize]| idx.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();
    let repertory = pick(special.pivot_indices());
    let free = pick(special.free_indices());

    let mut text = String::from("variables:");
    for (name, d) in names.iter().zip(problem.dims()) {
        text += &format!(" {name} [{d}]");
    }
    text += &format!("\nn = {n}, rank = {rank}, r = {r}\n");
    let mut json = json!({
        "variables": variables_json(problem),
        "n": n,
        "rank": rank,
        "r": r,
    });
    if r == 0 {
        text += R_ZERO_MESSAGE;
        json["canonical"] = json!([]);
        json["special"] = json!({ "repertory": repertory, "free": [], "groups": [] });
        json["transition"] = json!([]);
        json["note"] = json!(R_ZERO_MESSAGE);
        return Ok(Outcome::new(0, text, json));
    }
    text += "canonical basis:\n";
    for (i, g) in canonical.groups().iter().enumerate() {
        text += &group_line(i, g, names);
    }
    text += &format!("special basis (repertory: {}):\n", repertory.join(", "));
    for (i, g) in special.groups().iter().enumerate() {
        text += &group_line(i, g, names);
    }
    let t = transition(&canonical, special.basis())?;
    text += "transition (canonical to special):\n";
    let rows: Vec<Vec<String>> = t
        .matrix
        .row_vecs()
        .iter()
        .map(|row| row.iter().map(crate::exactlin::fmt_rational).collect())
        .collect();
    for row in &rows {
        text += &format!("  [{}]\n", row.join(", "));
    }
    json["canonical"] = Value::Array(canonical.groups().iter().map(rationals_json).collect());
    json["special"] = json!({
        "repertory": repertory,
        "free": free,
        "groups": special.groups().iter().map(rationals_json).collect::<Vec<_>>(),
    });
    json["transition"] = json!(rows);
    Ok(Outcome::new(0, text, json))
}

fn cmd_consistent(registry: &UnitRegistry, units: &[String], tol: f64) -> Result<Outcome, Failure> {
    let qs = registry.lookup_all(units)?;
    let report = is_consistent(&qs, tol)?;
    let list = units.join(" ");
    Ok(match report.witness {
        None => Outcome::new(
            0,
            format!("consistent: {list}"),
            json!({ "units": units, "consistent": true, "witness": null }),
        ),
        Some(w) => {
            let combo = w.combination.display_with(units);
            let factor = format_magnitude(w.clash_factor);
            let exponents: serde_json::Map<String, Value> = units
                .iter()
                .zip(w.combination.exponent_strings())
                .map(|(u, e)| (u.clone(), json!(e)))
                .collect();
            Outcome::new(
                1,
                format!("inconsistent: {list}\nclash: {combo} = {factor}"),
                json!({
                    "units": units,
                    "consistent": false,
                    "witness": { "combination": exponents, "display": combo, "clash_factor": factor },
                }),
            )
        }
    })
}

fn cmd_verify(problem: &Problem, cfg: &FuzzConfig) -> Result<Outcome, Failure> {
    let report = fuzz_invariance(problem, cfg)?;
    let json = serde_json::to_value(&report)?;
    let mut text = format!(
        "passed {}/{} trials (seed {})\n",
        report.passed, report.trials, report.seed
    );
    let code = match &report.counterexample {
        None => {
            text += &format!("note: {}", report.note);
            0
        }
        Some(c) => {
            text += &format!("counterexample at trial {}:\n", c.trial);
            text += &serde_json::to_string_pretty(&json["counterexample"])?;
            1
        }
    };
    Ok(Outcome::new(code, text, json))
}

fn pi_lines(
    basis: &PiBasis,
    names: &[String],
    label: &str,
    xs: &[Quantity],
) -> Result<(String, Vec<String>), Failure> {
    let values: Vec<String> = pi_values(basis, xs)?
        .values()
        .into_iter()
        .map(format_magnitude)
        .collect();
    let mut text = String::new();
    for (i, (g, v)) in basis.groups().iter().zip(&values).enumerate() {
        text += &format!("  {label}: pi{} = {} = {v}\n", i + 1, g.display_with(names));
    }
    Ok((text, values))
}

fn cmd_equiv(problem: &Problem, a: &str, b: &str, tol: f64) -> Result<Outcome, Failure> {
    let xs = problem.parse_bindings(a)?;
    let ys = problem.parse_bindings(b)?;
    let basis = pi_basis(problem.dims())?;
    let verdict = equivalent(&basis, &xs, &ys, tol);
    let (ta, va) = pi_lines(&basis, problem.names(), "a", &xs)?;
    let (tb, vb) = pi_lines(&basis, problem.names(), "b", &ys)?;
    let (headline, reason) = match verdict.reason {
        EquivalenceReason::Equivalent => {
            ("equivalent".to_string(), json!({ "kind": "equivalent" }))
        }
        EquivalenceReason::PiMismatch(i) => (
            format!("not equivalent: pi{} differs", i + 1),
            json!({ "kind": "pi_mismatch", "group": i + 1 }),
        ),
        EquivalenceReason::DimMismatch(i) => (
            format!("not equivalent: dimensions differ at slot {}", i + 1),
            json!({ "kind": "dim_mismatch", "slot": i + 1 }),
        ),
    };
    let text = format!("{headline}\n{ta}{tb}");
    let json = json!({
        "equivalent": verdict.equivalent,
        "reason": reason,
        "pi_a": va,
        "pi_b": vb,
    });
    Ok(Outcome::new(
        if verdict.equivalent { 0 } else { 1 },
        text,
        json,
    ))
}

fn cmd_nondim(problem: &Problem, at: &str, tol: f64) -> Result<Outcome, Failure> {
    let xs = problem.parse_bindings(at)?;
    let names = problem.names();
    let canonical = pi_basis(problem.dims())?;
    let special = special_basis(problem.dims())?;
    let reference: Vec<Quantity> = problem.dims().iter().cloned().map(Quantity::unit).collect();
    let (tc, vc) = pi_lines(&canonical, names, "canonical", &xs)?;
    let (ts, vs) = pi_lines(special.basis(), names, "special", &xs)?;
    let rep = canonical_rep(&special, &reference, &xs, tol)?;
    let g = nondimensionalize(problem, &special, &reference, tol)?;
    let value = g.holds(&pi_values(special.basis(), &xs)?)?;

    let mut text =
        format!("pi values:\n{tc}{ts}canonical representative (reference: coherent units):\n");
    let mut rep_json = serde_json::Map::new();
    for ((n, q), d) in names.iter().zip(&rep).zip(problem.dims()) {
        let mag = format_magnitude(q.magnitude());
        text += &format!("  {n} = {mag} {d}\n");
        rep_json.insert(n.clone(), json!({ "magnitude": mag, "dim": d.to_string() }));
    }
    text += &format!("relation at these pi values: {value}");
    let json = json!({
        "pi_canonical": vc,
        "pi_special": vs,
        "repertory": special.pivot_indices().iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
        "canonical_rep": rep_json,
        "relation": value,
    });
    Ok(Outcome::new(0, text, json))
}

fn cmd_check(spec: &ProblemSpec, path: &Path) -> Result<Outcome, Failure> {
    let problem = match Problem::from_spec(spec, path.parent()) {
        Ok(p) => p,
        Err(e @ (DslError::Dimension { .. } | DslError::Type { .. })) => return Ok(ill_typed(&e)),
        Err(e) => return Err(e.into()),
    };
    match problem.dimension_check() {
        Ok(Type::Bool) => Ok(Outcome::new(
            0,
            format!(
                "ok: {} is a dimensionally homogeneous predicate",
                problem.relation()
            ),
            json!({ "ok": true, "variables": variables_json(&problem), "relation": problem.relation().to_string() }),
        )),
        Ok(Type::Num(d)) => Ok(ill_typed(&DslError::Type {
            node: problem.relation().to_string(),
            msg: format!("relation has dimension {d}, expected a truth value"),
        })),
        Err(e @ (DslError::Dimension { .. } | DslError::Type { .. })) => Ok(ill_typed(&e)),
        Err(e) => Err(e.into()),
    }
}

fn ill_typed(e: &DslError) -> Outcome {
    Outcome::new(
        1,
        format!("ill-typed: {e}"),
        json!({ "ok": false, "error": e.to_string() }),
    )
}
