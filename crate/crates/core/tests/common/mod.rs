use std::path::{Path, PathBuf};
use std::process::Command;

/// One CLI invocation with its expected exit code; stdout is compared with
/// `tests/golden/<name>`.
pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
}

/// Golden cases for the mass-spring bases, the consistency fixtures and the
/// invariance fuzzing fixtures.
pub const ACCEPTANCE_CASES: &[Case] = &[
    Case {
        name: "pi_mass_spring.txt",
        args: &["pi", "--spec", "fixtures/mass_spring.json"],
        code: 0,
    },
    Case {
        name: "pi_mass_spring.json",
        args: &["pi", "--spec", "fixtures/mass_spring.json", "--json"],
        code: 0,
    },
    Case {
        name: "consistent_electronics.txt",
        args: &[
            "consistent",
            "--registry",
            "fixtures/si.json",
            "V",
            "A",
            "ohm",
            "s",
            "F",
        ],
        code: 0,
    },
    Case {
        name: "consistent_cm_hr_knot.txt",
        args: &[
            "consistent",
            "--registry",
            "fixtures/si.json",
            "cm",
            "hr",
            "knot",
        ],
        code: 1,
    },
    Case {
        name: "consistent_cm_hr_knot.json",
        args: &[
            "consistent",
            "--registry",
            "fixtures/si.json",
            "--json",
            "cm",
            "hr",
            "knot",
        ],
        code: 1,
    },
    Case {
        name: "verify_newton.txt",
        args: &[
            "verify",
            "--spec",
            "fixtures/newton.json",
            "--trials",
            "10000",
        ],
        code: 0,
    },
    Case {
        name: "verify_light_hidden.json",
        args: &[
            "verify",
            "--spec",
            "fixtures/light_hidden.json",
            "--trials",
            "10",
            "--json",
        ],
        code: 1,
    },
    Case {
        name: "verify_light_three.txt",
        args: &[
            "verify",
            "--spec",
            "fixtures/light_three.json",
            "--trials",
            "10000",
        ],
        code: 0,
    },
];

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs `case` and compares stdout and exit code. With `PIFORGE_BLESS=1`
/// the golden file is rewritten instead.
pub fn check_case(bin: &Path, case: &Case) -> Result<(), String> {
    let out = Command::new(bin)
        .args(case.args)
        .current_dir(manifest_dir())
        .env_remove("PIFORGE_REGISTRY")
        .output()
        .map_err(|e| format!("{}: {e}", case.name))?;
    let code = out.status.code().unwrap_or(-1);
    let golden = manifest_dir().join("tests/golden").join(case.name);
    if std::env::var_os("PIFORGE_BLESS").is_some() {
        std::fs::write(&golden, &out.stdout).map_err(|e| e.to_string())?;
    }
    if code != case.code {
        return Err(format!(
            "{}: exit {code}, expected {} (stderr: {})",
            case.name,
            case.code,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let expected = std::fs::read(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if expected != out.stdout {
        return Err(format!(
            "{}: output differs from golden\n--- expected\n{}\n--- got\n{}",
            case.name,
            String::from_utf8_lossy(&expected),
            String::from_utf8_lossy(&out.stdout)
        ));
    }
    Ok(())
}
