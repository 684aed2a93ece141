use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use proptest::prelude::*;

use piforge::dsl::{
    evaluate, parse_relation, typecheck, BinOp, CmpOp, EvalOptions, Evaluated, Expr, Func, Problem,
    Type, TypeEnv,
};
use piforge::exactlin::{frac, int, invert, kernel_basis, rank, solve, QMatrix, Rational};
use piforge::harness::{fuzz_invariance, rescale, FuzzConfig, Rescaling};
use piforge::pigroups::{pi_basis, special_basis, special_groups_via_rref};
use piforge::quantity::{dim_combine, project, qty_combine, DimSystem, DimVector, Fclcf, Quantity};
use piforge::units::{express, is_consistent};

fn matrix_strategy(
    max_rows: usize,
    max_cols: usize,
    lo: i64,
    hi: i64,
) -> impl Strategy<Value = QMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(lo..=hi, r * c)
            .prop_map(move |v| QMatrix::new(r, c, v.into_iter().map(int).collect()).unwrap())
    })
}

fn system(d: usize) -> Arc<DimSystem> {
    let names: Vec<String> = (0..d).map(|i| format!("D{i}")).collect();
    DimSystem::new(&names).unwrap()
}

fn dims_from(system: &Arc<DimSystem>, cols: &[Vec<i64>]) -> Vec<DimVector> {
    cols.iter()
        .map(|c| DimVector::new(system, c.iter().copied().map(int).collect()).unwrap())
        .collect()
}

/// `(d, columns)` with `n` columns of length `d`.
fn dims_strategy(
    max_d: usize,
    max_n: usize,
    e: i64,
) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_d, 1..=max_n).prop_flat_map(move |(d, n)| {
        (
            Just(d),
            prop::collection::vec(prop::collection::vec(-e..=e, d), n),
        )
    })
}

fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rank_nullity(m in matrix_strategy(6, 8, -3, 3)) {
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.len(), m.cols());
        for v in &k {
            prop_assert!(is_zero_vec(&m.mul_vec(v).unwrap()));
        }
        let stacked = QMatrix::from_rows(m.cols(), k.clone()).unwrap_or_else(|_| QMatrix::zeros(0, m.cols()));
        prop_assert_eq!(rank(&stacked), k.len());
    }

    #[test]
    fn inverse_iff_full_rank(m in (1usize..=5).prop_flat_map(|n| prop::collection::vec(-3i64..=3, n * n)
        .prop_map(move |v| QMatrix::new(n, n, v.into_iter().map(int).collect()).unwrap()))) {
        match invert(&m) {
            Ok(inv) => {
                prop_assert_eq!(inv.mul(&m).unwrap(), QMatrix::identity(m.rows()));
                prop_assert_eq!(m.mul(&inv).unwrap(), QMatrix::identity(m.rows()));
            }
            Err(_) => prop_assert!(rank(&m) < m.rows()),
        }
    }

    #[test]
    fn solve_reproduces_rhs(m in matrix_strategy(5, 6, -3, 3), seed in prop::collection::vec(-4i64..=4, 6)) {
        // A right-hand side in the column space.
        let x: Vec<Rational> = seed.iter().take(m.cols()).map(|&s| frac(s, 3)).collect();
        let b = m.mul_vec(&x).unwrap();
        let y = solve(&m, &b).unwrap();
        prop_assert_eq!(m.mul_vec(&y).unwrap(), b);
    }

    #[test]
    fn combine_commutes_with_projection(
        (d, cols) in dims_strategy(4, 6, 3),
        coeffs in prop::collection::vec(-6i64..=6, 6),
        mags in prop::collection::vec(-5.0f64..5.0, 6),
    ) {
        let s = system(d);
        let dims = dims_from(&s, &cols);
        let n = dims.len();
        let xs: Vec<Quantity> = dims.iter().zip(&mags).map(|(d, &l)| Quantity::from_log(l, d.clone()).unwrap()).collect();
        let p = Fclcf::new(coeffs.iter().take(n).map(|&c| frac(c, 2)).collect());
        let q = Fclcf::new(coeffs.iter().rev().take(n).map(|&c| int(c)).collect());
        let px = qty_combine(&s, &p, &xs).unwrap();
        prop_assert_eq!(&project(&px), &dim_combine(&s, &p, &dims).unwrap());
        // Combining with p + q multiplies the two combinations.
        let sum = Fclcf::new(p.coefficients().iter().zip(q.coefficients()).map(|(a, b)| a + b).collect());
        let lhs = qty_combine(&s, &sum, &xs).unwrap();
        let rhs = px.mul(&qty_combine(&s, &q, &xs).unwrap()).unwrap();
        prop_assert_eq!(lhs.dim(), rhs.dim());
        prop_assert!((lhs.log_magnitude() - rhs.log_magnitude()).abs() < 1e-9);
    }

    #[test]
    fn express_recovers_the_monomial(
        (d, cols) in dims_strategy(4, 4, 2),
        coeffs in prop::collection::vec(-4i64..=4, 4),
        logs in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let s = system(d);
        let dims = dims_from(&s, &cols);
        let a = piforge::quantity::dimension_matrix(&s, &dims).unwrap();
        prop_assume!(rank(&a) == dims.len());
        let base: Vec<Quantity> = dims.iter().zip(&logs).map(|(d, &l)| Quantity::from_log(l, d.clone()).unwrap()).collect();
        let p = Fclcf::new(coeffs.iter().take(base.len()).map(|&c| frac(c, 3)).collect());
        let target = qty_combine(&s, &p, &base).unwrap();
        let got = express(&base, &[target], 1e-9).unwrap();
        prop_assert_eq!(&got[0], &p);
        let recombined = dim_combine(&s, &got[0], &dims).unwrap();
        prop_assert_eq!(&recombined, &dim_combine(&s, &p, &dims).unwrap());
    }

    #[test]
    fn consistency_matches_brute_force(
        (d, cols) in dims_strategy(2, 4, 2),
        logs in prop::collection::vec(-3.0f64..3.0, 4),
        factors in prop::collection::vec(-2.0f64..2.0, 2),
        coherent in any::<bool>(),
    ) {
        let s = system(d);
        let dims = dims_from(&s, &cols);
        let n = dims.len();
        let units: Vec<Quantity> = if coherent {
            let unit: Vec<Quantity> = dims.iter().cloned().map(Quantity::unit).collect();
            rescale(&unit, &Rescaling::from_logs(&s, factors[..d].to_vec()).unwrap()).unwrap()
        } else {
            dims.iter().zip(&logs).map(|(d, &l)| Quantity::from_log(l, d.clone()).unwrap()).collect()
        };
        // Every integer combination with exponents in -4..=4 that is dimensionless.
        let mut kernel_hits = Vec::new();
        let mut c = vec![-4i64; n];
        loop {
            if c.iter().any(|&x| x != 0) {
                let p = Fclcf::from_i64(&c);
                if dim_combine(&s, &p, &dims).unwrap().is_dimensionless() {
                    kernel_hits.push(qty_combine(&s, &p, &units).unwrap().log_magnitude());
                }
            }
            let mut i = 0;
            while i < n && c[i] == 4 { c[i] = -4; i += 1; }
            if i == n { break; }
            c[i] += 1;
        }
        let a = piforge::quantity::dimension_matrix(&s, &dims).unwrap();
        prop_assume!(!kernel_hits.is_empty() || rank(&a) == n);
        let brute = kernel_hits.iter().all(|l| l.abs() <= 1e-9);
        let report = is_consistent(&units, 1e-9).unwrap();
        prop_assert_eq!(report.consistent, brute);
        if coherent {
            prop_assert!(report.consistent);
        }
    }

    #[test]
    fn special_basis_matches_rref_kernel((d, cols) in dims_strategy(4, 7, 3)) {
        let s = system(d);
        let dims = dims_from(&s, &cols);
        let sb = special_basis(&dims).unwrap();
        prop_assert_eq!(sb.groups().to_vec(), special_groups_via_rref(&dims).unwrap());
        let canonical = pi_basis(&dims).unwrap();
        prop_assert_eq!(canonical.r(), sb.groups().len());
        for (g, &l) in sb.groups().iter().zip(sb.free_indices()) {
            prop_assert_eq!(&g.coefficients()[l], &int(1));
            for &other in sb.free_indices().iter().filter(|&&o| o != l) {
                prop_assert!(g.coefficients()[other].is_zero());
            }
        }
    }
}

/// Random expressions over m [M], k [M T^-2], t [T], x [1].
fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["m", "k", "t", "x"]).prop_map(Expr::var),
        (1u32..2000).prop_map(|c| Expr::Const(c as f64 / 8.0)),
        Just(Expr::Pi),
        any::<bool>().prop_map(Expr::Bool),
    ];
    leaf.prop_recursive(5, 64, 2, |inner| {
        let bin = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]);
        let cmp = prop::sample::select(vec![
            CmpOp::Eq,
            CmpOp::Ne,
            CmpOp::Lt,
            CmpOp::Le,
            CmpOp::Gt,
            CmpOp::Ge,
        ]);
        let func = prop::sample::select(vec![
            Func::Exp,
            Func::Log,
            Func::Sin,
            Func::Cos,
            Func::Sqrt,
            Func::IsPosInt,
        ]);
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (bin, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::bin(op, a, b)),
            (inner.clone(), -4i64..=4, 1i64..=3).prop_map(|(a, p, q)| Expr::pow(a, frac(p, q))),
            (func, inner.clone()).prop_map(|(f, a)| Expr::call(f, a)),
            (cmp, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::cmp(op, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
            inner.prop_map(|a| Expr::Not(Box::new(a))),
        ]
    })
}

fn spring_env() -> (Arc<DimSystem>, TypeEnv) {
    let s = DimSystem::new(&["M", "T"]).unwrap();
    let env = TypeEnv::new(&s)
        .with("m", DimVector::new(&s, vec![int(1), int(0)]).unwrap())
        .with("k", DimVector::new(&s, vec![int(1), int(-2)]).unwrap())
        .with("t", DimVector::new(&s, vec![int(0), int(1)]).unwrap())
        .with("x", DimVector::zero(&s));
    (s, env)
}

fn bindings(env: &TypeEnv, logs: &[f64]) -> HashMap<String, Quantity> {
    ["m", "k", "t", "x"]
        .iter()
        .zip(logs)
        .map(|(n, &l)| {
            (
                n.to_string(),
                Quantity::from_log(l, env.vars[*n].clone()).unwrap(),
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn display_round_trips(e in expr_strategy()) {
        let printed = e.to_string();
        let reparsed = parse_relation(&printed).unwrap();
        prop_assert_eq!(&reparsed, &e);
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    #[test]
    fn well_typed_expressions_evaluate(e in expr_strategy(), logs in prop::collection::vec(-4.0f64..4.0, 4)) {
        let (s, env) = spring_env();
        if let Ok(ty) = typecheck(&e, &env) {
            let out = evaluate(&e, &s, &bindings(&env, &logs), EvalOptions::default());
            prop_assert!(out.is_ok(), "{} failed: {:?}", e, out);
            match (ty, out.unwrap()) {
                (Type::Bool, Evaluated::Truth(_)) => {}
                (Type::Num(d), Evaluated::Number(n)) => prop_assert_eq!(&d, n.dim()),
                (ty, v) => prop_assert!(false, "type {:?} but value {:?}", ty, v),
            }
        }
    }

    #[test]
    fn typecheck_ignores_magnitudes(e in expr_strategy()) {
        let (_, env) = spring_env();
        let first = typecheck(&e, &env).map_err(|e| e.to_string());
        prop_assert_eq!(first, typecheck(&e, &env.clone()).map_err(|e| e.to_string()));
    }

    #[test]
    fn dimensionless_expressions_commute_with_rescale(
        e in expr_strategy(),
        logs in prop::collection::vec(-3.0f64..3.0, 4),
        factors in prop::collection::vec(-4.0f64..4.0, 2),
    ) {
        let (s, env) = spring_env();
        // Only expressions closed over the dimensionless group and x.
        let group = parse_relation("(k/m)^(1/2) * t").unwrap();
        let e = substitute(&e, &group);
        let Ok(Type::Num(d)) = typecheck(&e, &env) else { return Ok(()) };
        prop_assume!(d.is_dimensionless());
        let b = bindings(&env, &logs);
        let names = ["m", "k", "t", "x"];
        let xs: Vec<Quantity> = names.iter().map(|n| b[*n].clone()).collect();
        let ys = rescale(&xs, &Rescaling::from_logs(&s, factors).unwrap()).unwrap();
        let rb: HashMap<String, Quantity> = names.iter().map(|n| n.to_string()).zip(ys).collect();
        let before = evaluate(&e, &s, &b, EvalOptions::default()).unwrap();
        let after = evaluate(&e, &s, &rb, EvalOptions::default()).unwrap();
        let (u, v) = (before.number().unwrap().value(), after.number().unwrap().value());
        if u.is_finite() && v.is_finite() {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(v.abs()).max(1.0), "{} vs {} for {}", u, v, e);
        } else {
            prop_assert_eq!(u.is_nan(), v.is_nan());
        }
    }
}

/// Replaces dimensioned variables by a dimensionless group.
fn substitute(e: &Expr, group: &Expr) -> Expr {
    let go = |a: &Expr| Box::new(substitute(a, group));
    match e {
        Expr::Var(n) if n != "x" => group.clone(),
        Expr::Var(_) | Expr::Const(_) | Expr::Pi | Expr::Bool(_) => e.clone(),
        Expr::Neg(a) => Expr::Neg(go(a)),
        Expr::Bin(op, a, b) => Expr::Bin(*op, go(a), go(b)),
        Expr::Pow(a, p) => Expr::Pow(go(a), p.clone()),
        Expr::Call(f, a) => Expr::Call(*f, go(a)),
        Expr::Cmp(op, a, b) => Expr::Cmp(*op, go(a), go(b)),
        Expr::And(a, b) => Expr::And(go(a), go(b)),
        Expr::Or(a, b) => Expr::Or(go(a), go(b)),
        Expr::Not(a) => Expr::Not(go(a)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relations_through_pi_pass_fuzzing(
        template in prop::sample::select(vec![
            "is_pos_int(P)", "sin(log(P)) > 0", "exp(-P) > 0.3", "P < 2 or sqrt(P) > 10",
            "log(P) > 1 and not (P > 1000)", "cos(log(P) / 3) < 0.5",
        ]),
        seed in any::<u64>(),
    ) {
        let relation = template.replace('P', "(k/m * t^2)");
        let s = DimSystem::new(&["M", "T"]).unwrap();
        let vars = vec![
            ("m".to_string(), DimVector::new(&s, vec![int(1), int(0)]).unwrap()),
            ("k".to_string(), DimVector::new(&s, vec![int(1), int(-2)]).unwrap()),
            ("t".to_string(), DimVector::new(&s, vec![int(0), int(1)]).unwrap()),
        ];
        let problem = Problem::new(&s, vars, &relation, None).unwrap();
        let report = fuzz_invariance(&problem, &FuzzConfig { trials: 200, seed, tol: 1e-9 }).unwrap();
        prop_assert!(report.counterexample.is_none(), "{}: {:?}", relation, report.counterexample);
    }

    #[test]
    fn fuzz_reports_are_order_independent(seed in any::<u64>()) {
        let s = DimSystem::new(&["L", "T"]).unwrap();
        let vars = vec![
            ("x".to_string(), DimVector::new(&s, vec![int(1), int(0)]).unwrap()),
            ("t".to_string(), DimVector::new(&s, vec![int(0), int(1)]).unwrap()),
        ];
        let problem = Problem::numeric(&s, vars, "x = 3 * t", None).unwrap();
        let cfg = FuzzConfig { trials: 64, seed, tol: 1e-9 };
        let a = fuzz_invariance(&problem, &cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| fuzz_invariance(&problem, &cfg).unwrap());
        prop_assert_eq!(a.counterexample.is_some(), a.passed < a.trials);
        prop_assert_eq!(a, b);
    }
}
