mod common;

use std::path::Path;

use common::{check_case, Case, ACCEPTANCE_CASES};

const MORE_CASES: &[Case] = &[
    Case {
        name: "pi_independent.txt",
        args: &["pi", "--spec", "fixtures/independent.json"],
        code: 0,
    },
    Case {
        name: "pi_electronics.txt",
        args: &["pi", "--spec", "fixtures/electronics.json"],
        code: 0,
    },
    Case {
        name: "nondim_mass_spring.txt",
        args: &[
            "nondim",
            "--spec",
            "fixtures/mass_spring.json",
            "--at",
            "m=2 M, k=8 M/T^2, t=3 T",
        ],
        code: 0,
    },
    Case {
        name: "nondim_mass_spring.json",
        args: &[
            "nondim",
            "--spec",
            "fixtures/mass_spring.json",
            "--at",
            "m=2 M, k=8 M/T^2, t=3 T",
            "--json",
        ],
        code: 0,
    },
    Case {
        name: "equiv_rescaled.txt",
        args: &[
            "equiv",
            "--spec",
            "fixtures/newton.json",
            "--a",
            "F=1 N, m=1 kg, a=1 m/s^2",
            "--b",
            "F=0.45359237 N, m=1 lb, a=1 m/s^2",
        ],
        code: 0,
    },
    Case {
        name: "equiv_identical.txt",
        args: &[
            "equiv",
            "--spec",
            "fixtures/mass_spring.json",
            "--a",
            "m=2 M, k=8 M/T^2, t=3 T",
            "--b",
            "m=2 M, k=8 M/T^2, t=3 T",
        ],
        code: 0,
    },
    Case {
        name: "equiv_different.txt",
        args: &[
            "equiv",
            "--spec",
            "fixtures/mass_spring.json",
            "--a",
            "m=2 M, k=8 M/T^2, t=3 T",
            "--b",
            "m=2 M, k=8 M/T^2, t=4 T",
        ],
        code: 1,
    },
    Case {
        name: "check_newton.txt",
        args: &["check", "--spec", "fixtures/newton.json"],
        code: 0,
    },
    Case {
        name: "check_light_hidden.txt",
        args: &["check", "--spec", "fixtures/light_hidden.json"],
        code: 1,
    },
    Case {
        name: "check_ill_typed.json",
        args: &["check", "--spec", "fixtures/ill_typed.json", "--json"],
        code: 1,
    },
    Case {
        name: "consistent_single.txt",
        args: &["consistent", "--registry", "fixtures/si.json", "knot"],
        code: 0,
    },
];

fn bin() -> &'static Path {
    Path::new(env!("CARGO_BIN_EXE_piforge"))
}

#[test]
fn acceptance_goldens() {
    for case in ACCEPTANCE_CASES {
        check_case(bin(), case).unwrap();
    }
}

#[test]
fn other_goldens() {
    for case in MORE_CASES {
        check_case(bin(), case).unwrap();
    }
}

#[test]
fn outputs_are_repeatable() {
    for case in &ACCEPTANCE_CASES[..3] {
        check_case(bin(), case).unwrap();
        check_case(bin(), case).unwrap();
    }
}

#[test]
fn registry_from_environment() {
    let out = std::process::Command::new(bin())
        .args(["consistent", "cm", "hr", "knot"])
        .current_dir(common::manifest_dir())
        .env("PIFORGE_REGISTRY", "fixtures/si.json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("clash: cm^-1*hr*knot = 185200"));

    let out = std::process::Command::new(bin())
        .args(["consistent", "cm"])
        .current_dir(common::manifest_dir())
        .env_remove("PIFORGE_REGISTRY")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_failures_exit_two() {
    for args in [
        &["pi", "--spec", "fixtures/missing.json"][..],
        &["consistent", "--registry", "fixtures/si.json", "parsec"],
        &[
            "nondim",
            "--spec",
            "fixtures/mass_spring.json",
            "--at",
            "m=2 M",
        ],
        &[
            "equiv",
            "--spec",
            "fixtures/mass_spring.json",
            "--a",
            "m=2 M, k=8 M, t=3 T",
            "--b",
            "m=1 M, k=1 M/T^2, t=1 T",
        ],
        &["verify", "--spec", "fixtures/ill_typed.json"],
        &["pi"],
    ] {
        let out = std::process::Command::new(bin())
            .args(args)
            .current_dir(common::manifest_dir())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
