//! Fuzzing relations for invariance under rescaling of the fundamental units.

use std::path::Path;

use piforge::dsl::Problem;
use piforge::harness::{fuzz_invariance, FuzzConfig};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let cfg = FuzzConfig {
        trials: 10_000,
        ..FuzzConfig::default()
    };
    for file in ["newton.json", "light_three.json", "light_hidden.json"] {
        let problem = Problem::load(&dir.join(file)).unwrap();
        let report = fuzz_invariance(&problem, &cfg).unwrap();
        print!(
            "{:<40} {}/{} passed",
            problem.relation().to_string(),
            report.passed,
            report.trials
        );
        match &report.counterexample {
            None => println!(),
            Some(c) => println!(
                "; first violation at trial {} with factors {:?} ({} -> {})",
                c.trial, c.factors, c.before, c.after
            ),
        }
    }
}
