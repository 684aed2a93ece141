//! Turning a dimensioned relation into a relation on pi values.

use std::path::Path;

use piforge::dsl::Problem;
use piforge::nondim::{canonical_rep, nondimensionalize, PiValues, EQUIV_TOL};
use piforge::pigroups::special_basis;
use piforge::quantity::Quantity;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mass_spring.json");
    let problem = Problem::load(&path).unwrap();
    println!("relation: {}", problem.relation());

    let sb = special_basis(problem.dims()).unwrap();
    let reference: Vec<Quantity> = problem.dims().iter().cloned().map(Quantity::unit).collect();
    let g = nondimensionalize(&problem, &sb, &reference, EQUIV_TOL).unwrap();

    let xs = problem.parse_bindings("m=2 M, k=8 M/T^2, t=3 T").unwrap();
    let rep = canonical_rep(&sb, &reference, &xs, EQUIV_TOL).unwrap();
    let mags: Vec<f64> = rep.iter().map(|q| q.magnitude()).collect();
    println!("canonical representative of (2, 8, 3): {mags:?}");

    // The special group is t*sqrt(k/m); the relation holds at multiples of 2*pi.
    for v in [
        1.0,
        2.0 * std::f64::consts::PI,
        4.0 * std::f64::consts::PI,
        7.0,
    ] {
        println!(
            "g({v:.4}) = {}",
            g.holds(&PiValues::from_values(&[v])).unwrap()
        );
    }
    println!("f(2, 8, 3) = {}", g.recompose(&xs).unwrap());
}
