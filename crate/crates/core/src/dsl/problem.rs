use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::eval::{EvalOptions, Evaluated, Evaluator};
use super::typecheck::{typecheck, Type, TypeEnv};
use super::{parse_dimension, parse_quantity, parse_quantity_in, parse_relation, DslError, Expr};
use crate::quantity::{DimSystem, DimVector, Quantity};
use crate::units::UnitRegistry;

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub system: Vec<String>,
    pub variables: IndexMap<String, String>,
    pub relation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<String>,
    /// When set, variables in the relation stand for their bare magnitudes
    /// in the reference units, so the relation need not be dimensionally
    /// homogeneous. Such relations are tied to one system of units.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub numeric: bool,
}

/// A parsed and type-checked problem: ordered variables with their
/// dimensions and a boolean relation over them.
#[derive(Debug, Clone)]
pub struct Problem {
    system: Arc<DimSystem>,
    names: Vec<String>,
    dims: Vec<DimVector>,
    relation: Expr,
    registry: Option<UnitRegistry>,
    numeric: bool,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, DslError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DslError::Spec(format!("{}: {e}", path.display())))?;
        let spec: ProblemSpec = serde_json::from_str(&text)
            .map_err(|e| DslError::Spec(format!("{}: {e}", path.display())))?;
        Problem::from_spec(&spec, path.parent())
    }

    /// Resolves a spec; a relative registry path is taken relative to `base_dir`.
    pub fn from_spec(spec: &ProblemSpec, base_dir: Option<&Path>) -> Result<Problem, DslError> {
        let system = DimSystem::new(&spec.system)?;
        let registry = match &spec.registry {
            None => None,
            Some(p) => {
                let mut path = PathBuf::from(p);
                if path.is_relative() {
                    if let Some(base) = base_dir {
                        path = base.join(path);
                    }
                }
                let reg = UnitRegistry::load(&path).map_err(|e| DslError::Spec(e.to_string()))?;
                if reg.system().as_ref() != system.as_ref() {
                    return Err(DslError::Spec(
                        "registry and problem declare different dimension systems".into(),
                    ));
                }
                Some(reg)
            }
        };
        let variables = spec
            .variables
            .iter()
            .map(|(n, d)| Ok((n.clone(), parse_dimension(d, &system)?)))
            .collect::<Result<Vec<_>, DslError>>()?;
        Problem::build(&system, variables, &spec.relation, registry, spec.numeric)
    }

    pub fn new(
        system: &Arc<DimSystem>,
        variables: Vec<(String, DimVector)>,
        relation: &str,
        registry: Option<UnitRegistry>,
    ) -> Result<Problem, DslError> {
        Problem::build(system, variables, relation, registry, false)
    }

    /// A problem whose relation reads each variable as its magnitude in the
    /// reference units (see [`ProblemSpec::numeric`]).
    pub fn numeric(
        system: &Arc<DimSystem>,
        variables: Vec<(String, DimVector)>,
        relation: &str,
        registry: Option<UnitRegistry>,
    ) -> Result<Problem, DslError> {
        Problem::build(system, variables, relation, registry, true)
    }

    fn build(
        system: &Arc<DimSystem>,
        variables: Vec<(String, DimVector)>,
        relation: &str,
        registry: Option<UnitRegistry>,
        numeric: bool,
    ) -> Result<Problem, DslError> {
        if variables.is_empty() {
            return Err(DslError::Spec("at least one variable is required".into()));
        }
        let mut env = TypeEnv::new(system);
        for (n, d) in &variables {
            if !crate::quantity::is_identifier(n) || is_reserved(n) {
                return Err(DslError::Spec(format!(
                    "'{n}' is not a valid variable name"
                )));
            }
            let d = if numeric {
                DimVector::zero(system)
            } else {
                d.clone()
            };
            if env.vars.insert(n.clone(), d).is_some() {
                return Err(DslError::Spec(format!("duplicate variable '{n}'")));
            }
        }
        let relation = parse_relation(relation)?;
        match typecheck(&relation, &env)? {
            Type::Bool => {}
            Type::Num(d) => {
                return Err(DslError::Type {
                    node: relation.to_string(),
                    msg: format!("relation has dimension {d}, expected a truth value"),
                })
            }
        }
        let (names, dims) = variables.into_iter().unzip();
        Ok(Problem {
            system: Arc::clone(system),
            names,
            dims,
            relation,
            registry,
            numeric,
        })
    }

    pub fn system(&self) -> &Arc<DimSystem> {
        &self.system
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dims(&self) -> &[DimVector] {
        &self.dims
    }

    pub fn relation(&self) -> &Expr {
        &self.relation
    }

    pub fn registry(&self) -> Option<&UnitRegistry> {
        self.registry.as_ref()
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn is_numeric(&self) -> bool {
        self.numeric
    }

    /// Environment binding each variable to its declared dimension.
    pub fn type_env(&self) -> TypeEnv {
        let mut env = TypeEnv::new(&self.system);
        for (n, d) in self.names.iter().zip(&self.dims) {
            env.vars.insert(n.clone(), d.clone());
        }
        env
    }

    /// Type-checks the relation against the declared dimensions. For a
    /// numeric problem this is where a hidden dimensional constant shows up.
    pub fn dimension_check(&self) -> Result<Type, DslError> {
        typecheck(&self.relation, &self.type_env())
    }

    /// Evaluates any expression over this problem's variables at `xs`.
    pub fn evaluate_expr(
        &self,
        expr: &Expr,
        xs: &[Quantity],
        opts: EvalOptions,
    ) -> Result<Evaluated, DslError> {
        if xs.len() != self.names.len() {
            return Err(DslError::Spec(format!(
                "expected {} bindings, got {}",
                self.names.len(),
                xs.len()
            )));
        }
        let bare: Vec<Quantity>;
        let xs = if self.numeric {
            let zero = DimVector::zero(&self.system);
            bare = xs
                .iter()
                .map(|x| Quantity::from_log(x.log_magnitude(), zero.clone()))
                .collect::<Result<_, _>>()?;
            &bare
        } else {
            xs
        };
        let lookup = |name: &str| self.names.iter().position(|n| n == name).map(|i| &xs[i]);
        Evaluator {
            system: &self.system,
            lookup: &lookup,
            opts,
        }
        .eval(expr)
    }

    /// Truth value of the relation at `xs`, given in variable order.
    pub fn eval(&self, xs: &[Quantity], opts: EvalOptions) -> Result<bool, DslError> {
        self.evaluate_expr(&self.relation, xs, opts)?
            .truth()
            .ok_or_else(|| DslError::Type {
                node: self.relation.to_string(),
                msg: "relation did not produce a truth value".into(),
            })
    }

    /// Parses one quantity literal: registry units when a registry is
    /// attached, otherwise fundamental reference units.
    pub fn parse_quantity(&self, text: &str) -> Result<Quantity, DslError> {
        match &self.registry {
            Some(reg) => parse_quantity(text, reg),
            None => parse_quantity_in(text, &self.system),
        }
    }

    /// Parses `name=<quantity>` pairs separated by commas or semicolons and
    /// returns them in variable order.
    pub fn parse_bindings(&self, text: &str) -> Result<Vec<Quantity>, DslError> {
        let mut found: HashMap<String, Quantity> = HashMap::new();
        for part in text
            .split([',', ';'])
            .map(str::trim)
            .filter(|p| !p.is_empty())
        {
            let (name, literal) = part
                .split_once('=')
                .ok_or_else(|| DslError::Spec(format!("binding '{part}' is not name=value")))?;
            let name = name.trim();
            let i = self
                .names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| DslError::UnknownVariable(name.to_string()))?;
            let q = self.parse_quantity(literal.trim())?;
            if q.dim() != &self.dims[i] {
                return Err(DslError::Dimension {
                    node: part.to_string(),
                    left: self.dims[i].to_string(),
                    right: q.dim().to_string(),
                });
            }
            if found.insert(name.to_string(), q).is_some() {
                return Err(DslError::Spec(format!("'{name}' bound twice")));
            }
        }
        self.names
            .iter()
            .map(|n| {
                found
                    .remove(n)
                    .ok_or_else(|| DslError::Spec(format!("missing binding for '{n}'")))
            })
            .collect()
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(
        name,
        "pi" | "true"
            | "false"
            | "and"
            | "or"
            | "not"
            | "exp"
            | "log"
            | "ln"
            | "sin"
            | "cos"
            | "sqrt"
            | "is_pos_int"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spring_spec() -> ProblemSpec {
        serde_json::from_str(
            r#"{
                "system": ["M", "T"],
                "variables": { "m": "M", "k": "M*T^-2", "t": "T" },
                "relation": "is_pos_int(t/(2*pi) * (k/m)^(1/2))"
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn spec_resolves_in_declaration_order() {
        let p = Problem::from_spec(&spring_spec(), None).unwrap();
        assert_eq!(p.names(), &["m", "k", "t"]);
        assert_eq!(p.dims()[1].to_string(), "M*T^-2");
    }

    #[test]
    fn ill_typed_specs_are_rejected() {
        let mut spec = spring_spec();
        spec.relation = "m + t > 0".into();
        assert!(matches!(
            Problem::from_spec(&spec, None),
            Err(DslError::Dimension { .. })
        ));
        spec.relation = "m * t".into();
        assert!(matches!(
            Problem::from_spec(&spec, None),
            Err(DslError::Type { .. })
        ));
        spec.relation = "x > m".into();
        assert!(matches!(
            Problem::from_spec(&spec, None),
            Err(DslError::UnknownVariable(_))
        ));
        let mut spec = spring_spec();
        spec.variables.insert("pi".into(), "1".into());
        assert!(matches!(
            Problem::from_spec(&spec, None),
            Err(DslError::Spec(_))
        ));
    }

    #[test]
    fn bindings_in_reference_units() {
        let p = Problem::from_spec(&spring_spec(), None).unwrap();
        let xs = p.parse_bindings("t=3 T, m=2 M; k=8 M/T^2").unwrap();
        let mags: Vec<f64> = xs.iter().map(|q| q.magnitude()).collect();
        assert!((mags[0] - 2.0).abs() < 1e-12);
        assert!((mags[1] - 8.0).abs() < 1e-12);
        assert!((mags[2] - 3.0).abs() < 1e-12);
        assert!(matches!(
            p.parse_bindings("m=2 M, k=8 M"),
            Err(DslError::Dimension { .. })
        ));
        assert!(matches!(p.parse_bindings("m=2 M"), Err(DslError::Spec(_))));
    }

    #[test]
    fn eval_in_variable_order() {
        let p = Problem::from_spec(&spring_spec(), None).unwrap();
        let k = 4.0 * std::f64::consts::PI.powi(2);
        let xs = p
            .parse_bindings(&format!("m=1 M, k={k} M*T^-2, t=2 T"))
            .unwrap();
        assert!(p.eval(&xs, EvalOptions::default()).unwrap());
    }

    #[test]
    fn numeric_relations_skip_homogeneity() {
        let spec: ProblemSpec = serde_json::from_str(
            r#"{ "system": ["L", "T"], "variables": { "x": "L", "t": "T" },
                 "relation": "x = 299792458 * t", "numeric": true }"#,
        )
        .unwrap();
        let p = Problem::from_spec(&spec, None).unwrap();
        assert!(p.is_numeric());
        assert!(matches!(
            p.dimension_check(),
            Err(DslError::Dimension { .. })
        ));
        let xs = p.parse_bindings("x=599584916 L, t=2 T").unwrap();
        assert!(p.eval(&xs, EvalOptions::default()).unwrap());
        let mut strict = spec.clone();
        strict.numeric = false;
        assert!(Problem::from_spec(&strict, None).is_err());
    }
}
