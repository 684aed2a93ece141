//! Expressing derived units in a fundamental base.

use std::path::Path;

use piforge::units::{
    express, fundamental_basis, fundamental_indices, UnitError, UnitRegistry, CLASH_TOL,
};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let si = UnitRegistry::load(&dir.join("si.json")).unwrap();

    let list = ["kg", "N", "m", "J", "s", "A"];
    let units = si.lookup_all(&list).unwrap();
    let base = fundamental_basis(&units, CLASH_TOL).unwrap();
    let base_names: Vec<String> = fundamental_indices(&units)
        .unwrap()
        .into_iter()
        .map(|i| list[i].to_string())
        .collect();
    println!("fundamental subfamily of {list:?}: {base_names:?}");
    let targets = ["V", "ohm", "F", "W", "C"];
    let exprs = express(&base, &si.lookup_all(&targets).unwrap(), CLASH_TOL).unwrap();
    for (t, e) in targets.iter().zip(exprs) {
        println!("{t:>4} = {}", e.display_with(&base_names));
    }

    // A knot is a length over a time, but not the cm/hr one.
    let cm_hr = UnitRegistry::load(&dir.join("cm_hr.json")).unwrap();
    let base = cm_hr.lookup_all(&["cm", "hr"]).unwrap();
    match express(&base, &cm_hr.lookup_all(&["knot"]).unwrap(), CLASH_TOL) {
        Err(UnitError::MagnitudeMismatch { factor, .. }) => {
            println!("knot is not a product of powers of cm and hr (off by {factor})")
        }
        other => println!("unexpected: {other:?}"),
    }
}
