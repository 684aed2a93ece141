//! Parsing and type-checking relations, then evaluating them.

use std::collections::HashMap;

use piforge::dsl::{evaluate, parse_dimension, parse_relation, typecheck, EvalOptions, TypeEnv};
use piforge::quantity::{DimSystem, Quantity};

fn main() {
    let system = DimSystem::new(&["M", "T"]).unwrap();
    let mut env = TypeEnv::new(&system);
    for (n, d) in [("m", "M"), ("k", "M*T^-2"), ("t", "T")] {
        env.vars
            .insert(n.to_string(), parse_dimension(d, &system).unwrap());
    }
    for text in [
        "m^(-1/2) * k^(1/2) * t",
        "is_pos_int(t/(2*pi) * (k/m)^(1/2))",
        "sqrt(k*m) * t",
        "m + t",
        "exp(m)",
    ] {
        match parse_relation(text).and_then(|e| typecheck(&e, &env).map(|ty| (e, ty))) {
            Ok((e, ty)) => println!("{e:<50} : {ty}"),
            Err(err) => println!("{text:<50} : {err}"),
        }
    }

    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    let e = parse_relation("is_pos_int(t/(2*pi) * (k/m)^(1/2))").unwrap();
    for t in [1.0, 1.5, 2.0] {
        let bindings: HashMap<String, Quantity> = [("m", 1.0), ("k", four_pi2), ("t", t)]
            .into_iter()
            .map(|(n, v)| {
                (
                    n.to_string(),
                    Quantity::new(v, env.vars[n].clone()).unwrap(),
                )
            })
            .collect();
        let out = evaluate(&e, &system, &bindings, EvalOptions::default()).unwrap();
        println!("t = {t}: {:?}", out.truth().unwrap());
    }
}
