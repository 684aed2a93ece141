//! Consistency of unit lists against a registry, with clash witnesses.

use std::path::Path;

use piforge::units::{is_consistent, UnitRegistry, CLASH_TOL};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/si.json");
    let registry = UnitRegistry::load(&path).expect("fixture registry");
    for list in [
        &["V", "A", "ohm", "s", "F"][..],
        &["cm", "hr", "knot"],
        &["kg", "ft", "min"],
        &["N"],
    ] {
        let units = registry.lookup_all(list).unwrap();
        let report = is_consistent(&units, CLASH_TOL).unwrap();
        let names: Vec<String> = list.iter().map(|s| s.to_string()).collect();
        match report.witness {
            None => println!("{:<20} consistent", list.join(" ")),
            Some(w) => println!(
                "{:<20} clash: {} = {}",
                list.join(" "),
                w.combination.display_with(&names),
                w.clash_factor
            ),
        }
    }
}
