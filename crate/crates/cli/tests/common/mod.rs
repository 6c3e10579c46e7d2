//! CLI invocations paired with the library calls they must reproduce.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use fusionlab::analysis::{
    ergodicity_report, frequency_hull, patch_frequency_estimate, primitivity_check,
    van_hove_diagnostic, ErgodicityOptions,
};
use fusionlab::dsl::RuleSummary;
use fusionlab::expand::{expand_supertile, is_admissible, parse_word, render_svg};
use fusionlab::{builtins, ExpansionBudget, Hierarchy};
use fusionlab_cli::{envelope, to_json};
use num_rational::BigRational;
use serde_json::{json, Value};

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub library: fn() -> Value,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

pub const CASES: &[Case] = &[
    Case {
        name: "parse",
        args: &["parse", "fiblike"],
        library: || to_json(&RuleSummary::of(&builtins::load("fiblike").unwrap())),
    },
    Case {
        name: "expand",
        args: &["expand", "thue_morse", "--supertile", "S1", "--level", "3"],
        library: || {
            let r = builtins::load("thue_morse").unwrap();
            to_json(&expand_supertile(&r, 3, "S1", ExpansionBudget::default()).unwrap())
        },
    },
    Case {
        name: "matrix",
        args: &["matrix", "ten_pow_n", "--from", "2", "--to", "3"],
        library: || {
            let r = builtins::load("ten_pow_n").unwrap();
            to_json(&Hierarchy::new(&r).transition_matrix(2, 3).unwrap())
        },
    },
    Case {
        name: "primitivity",
        args: &["primitivity", "fiblike", "--level", "2", "--max-offset", "5"],
        library: || {
            let r = builtins::load("fiblike").unwrap();
            to_json(&primitivity_check(&Hierarchy::new(&r), 2, 5).unwrap())
        },
    },
    Case {
        name: "vanhove",
        args: &["vanhove", "chair", "--depth", "4"],
        library: || {
            let r = builtins::load("chair").unwrap();
            let h = Hierarchy::new(&r);
            to_json(&van_hove_diagnostic(&h, 4, 1, half(), ExpansionBudget::default()).unwrap())
        },
    },
    Case {
        name: "freq",
        args: &["freq", "fibonacci", "--level", "0", "--horizon", "20"],
        library: || {
            let r = builtins::load("fibonacci").unwrap();
            to_json(&frequency_hull(&Hierarchy::new(&r), 0, 20).unwrap())
        },
    },
    Case {
        name: "freq_report",
        args: &["freq", "ten_pow_n", "--horizon", "6", "--report"],
        library: || {
            let r = builtins::load("ten_pow_n").unwrap();
            let opts = ErgodicityOptions::default();
            to_json(&ergodicity_report(&Hierarchy::new(&r), 0, 6, &opts).unwrap())
        },
    },
    Case {
        name: "patchfreq",
        args: &["patchfreq", "thue_morse", "--word", "AA", "--level", "4", "--horizon", "10"],
        library: || {
            let r = builtins::load("thue_morse").unwrap();
            let p = parse_word(&r, "AA").unwrap();
            let h = Hierarchy::new(&r);
            to_json(&patch_frequency_estimate(&h, &p, 4, 10, ExpansionBudget::default()).unwrap())
        },
    },
    Case {
        name: "admissible",
        args: &["admissible", "thue_morse", "--word", "AA", "--level", "8"],
        library: || {
            let r = builtins::load("thue_morse").unwrap();
            let p = parse_word(&r, "AA").unwrap();
            to_json(&is_admissible(&r, &p, 8, ExpansionBudget::default()).unwrap())
        },
    },
    Case {
        name: "render",
        args: &["render", "chair", "--supertile", "SW", "--level", "2", "--out", "svg"],
        library: || {
            let r = builtins::load("chair").unwrap();
            let p = expand_supertile(&r, 2, "SW", ExpansionBudget::default()).unwrap();
            json!({ "format": "svg", "content": render_svg(&p, 10) })
        },
    },
    Case {
        name: "examples",
        args: &["examples"],
        library: || {
            Value::Array(
                builtins::EXAMPLES
                    .iter()
                    .map(|e| json!({ "name": e.name, "description": e.description }))
                    .collect(),
            )
        },
    },
    Case {
        name: "examples_show",
        args: &["examples", "--show", "fiblike"],
        library: || {
            let e = builtins::find("fiblike").unwrap();
            json!({ "name": e.name, "source": e.source })
        },
    },
];

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"))
}

/// The envelope the CLI must print, built from the library result.
pub fn expected(case: &Case) -> String {
    let command = case.args[0];
    envelope(command, Some((case.library)()), &[])
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn fusion(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fusion"))
        .args(args)
        .output()
        .expect("fusion runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Checks one case: golden equals the library envelope, and the CLI output
/// equals the golden byte for byte. `UPDATE_GOLDEN=1` rewrites goldens.
pub fn check_case(case: &Case) -> Result<(), String> {
    let want = expected(case);
    let path = golden_path(case.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &want).map_err(|e| e.to_string())?;
    }
    let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if golden != want {
        return Err(format!("{}: golden differs from the library result", case.name));
    }
    let mut args = case.args.to_vec();
    args.push("--json");
    let run = fusion(&args);
    if run.code != 0 {
        return Err(format!("{}: exit {} ({})", case.name, run.code, run.stderr));
    }
    if run.stdout != golden {
        return Err(format!("{}: CLI output differs from golden", case.name));
    }
    Ok(())
}
