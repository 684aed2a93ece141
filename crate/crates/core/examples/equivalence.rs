//! Deciding whether two bindings differ only by a change of units.

use piforge::dsl::parse_dimension;
use piforge::harness::{oracle_equivalent, rescale, Rescaling};
use piforge::nondim::{equivalent, pi_values, EQUIV_TOL};
use piforge::pigroups::pi_basis;
use piforge::quantity::{DimSystem, Quantity};

fn main() {
    let system = DimSystem::new(&["M", "T"]).unwrap();
    let dims: Vec<_> = ["M", "M*T^-2", "T"]
        .iter()
        .map(|d| parse_dimension(d, &system).unwrap())
        .collect();
    let basis = pi_basis(&dims).unwrap();
    let xs: Vec<Quantity> = dims
        .iter()
        .zip([2.0, 8.0, 3.0])
        .map(|(d, v)| Quantity::new(v, d.clone()).unwrap())
        .collect();
    println!(
        "pi at (2, 8, 3): {:?}",
        pi_values(&basis, &xs).unwrap().values()
    );

    // Measure mass in grams and time in minutes.
    let ys = rescale(&xs, &Rescaling::new(&system, &[1e-3, 60.0]).unwrap()).unwrap();
    let v = equivalent(&basis, &xs, &ys, EQUIV_TOL);
    println!(
        "after a change of units: {:?} (oracle says {})",
        v.reason,
        oracle_equivalent(&xs, &ys).unwrap()
    );

    let mut zs = ys.clone();
    zs[2] = zs[2].scale_log(1.01f64.ln());
    let v = equivalent(&basis, &xs, &zs, EQUIV_TOL);
    println!(
        "with t perturbed by 1%: {:?} (oracle says {})",
        v.reason,
        oracle_equivalent(&xs, &zs).unwrap()
    );
}
