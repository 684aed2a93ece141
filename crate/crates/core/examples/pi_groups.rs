//! Canonical and special pi-group bases, and the transition between them.

use piforge::dsl::parse_dimension;
use piforge::pigroups::{pi_basis, special_basis, transition};
use piforge::quantity::DimSystem;

fn main() {
    let system = DimSystem::new(&["M", "T"]).unwrap();
    let names = ["m", "k", "t"].map(String::from);
    let dims: Vec<_> = ["M", "M*T^-2", "T"]
        .iter()
        .map(|d| parse_dimension(d, &system).unwrap())
        .collect();

    let canonical = pi_basis(&dims).unwrap();
    println!(
        "n = {}, rank = {}, r = {}",
        canonical.n(),
        canonical.rank(),
        canonical.r()
    );
    for g in canonical.groups() {
        println!("canonical group: {}", g.display_with(&names));
    }
    let special = special_basis(&dims).unwrap();
    let repertory: Vec<&str> = special
        .pivot_indices()
        .iter()
        .map(|&i| names[i].as_str())
        .collect();
    println!("repertory: {repertory:?}");
    for g in special.groups() {
        println!("special group: {}", g.display_with(&names));
    }
    let t = transition(&canonical, special.basis()).unwrap();
    println!("transition {} with inverse {}", t.matrix, t.inverse);
}
