#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::de::DeserializeOwned;
use serde::Serialize;
use torusmix_cli::{
    to_json, ClassifyReport, CriterionRunReport, ErrorBody, IterateReport, MixVerifyReport, ProductSimReport,
};

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

const I: &str = "tests/golden/inputs/";

macro_rules! case {
    ($name:expr, $exit:expr, [$($arg:expr),* $(,)?]) => {
        Case { name: $name, exit: $exit, args: &[$($arg),*] }
    };
}

pub const CASES: &[Case] = &[
    case!(
        "classify_doubling",
        0,
        ["classify", "--map", "tests/golden/inputs/doubling.json"]
    ),
    case!(
        "classify_identity",
        0,
        ["classify", "--map", "tests/golden/inputs/identity.json"]
    ),
    case!(
        "classify_diagonal",
        0,
        ["classify", "--map", "tests/golden/inputs/diagonal.json"]
    ),
    case!(
        "classify_perm_twos",
        0,
        ["classify", "--map", "tests/golden/inputs/perm_twos.json"]
    ),
    case!(
        "classify_perm_example",
        0,
        ["classify", "--map", "tests/golden/inputs/perm_example.json"]
    ),
    case!(
        "iterate_doubling",
        0,
        [
            "iterate",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--point",
            "[\"1/8\"]",
            "--r",
            "3"
        ]
    ),
    case!(
        "iterate_r0",
        0,
        [
            "iterate",
            "--map",
            "tests/golden/inputs/tripling.json",
            "--point",
            "[\"5/7\"]",
            "--r",
            "0"
        ]
    ),
    case!(
        "iterate_perm_exponents",
        0,
        [
            "iterate",
            "--map",
            "tests/golden/inputs/perm_example.json",
            "--point",
            "[\"1/2\",\"1/3\",\"1/5\",\"1/7\",\"1/11\"]",
            "--r",
            "3",
            "--exponents",
        ]
    ),
    case!(
        "mix_verify_doubling",
        0,
        [
            "mix-verify",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--u",
            "tests/golden/inputs/arc_small.json",
            "--v",
            "tests/golden/inputs/arc_small.json",
            "--n-max",
            "64",
        ]
    ),
    case!(
        "mix_verify_full",
        0,
        [
            "mix-verify",
            "--map",
            "tests/golden/inputs/tripling.json",
            "--u",
            "tests/golden/inputs/arc_full.json",
            "--v",
            "tests/golden/inputs/arc_full.json",
            "--n-max",
            "8",
            "--resolution",
            "4",
        ]
    ),
    case!(
        "mix_verify_diagonal",
        0,
        [
            "mix-verify",
            "--map",
            "tests/golden/inputs/diagonal.json",
            "--u",
            "tests/golden/inputs/square_u.json",
            "--v",
            "tests/golden/inputs/off_diagonal_v.json",
            "--n-max",
            "50",
        ]
    ),
    case!(
        "criterion_prop1_tripling",
        0,
        [
            "criterion",
            "--map",
            "tests/golden/inputs/tripling.json",
            "--witness",
            "prop1",
            "--horizon",
            "15"
        ]
    ),
    case!(
        "criterion_prop1_identity",
        0,
        [
            "criterion",
            "--map",
            "tests/golden/inputs/identity.json",
            "--witness",
            "prop1",
            "--horizon",
            "15",
            "--levels",
            "3",
        ]
    ),
    case!(
        "criterion_prop2_perm_twos",
        0,
        [
            "criterion",
            "--map",
            "tests/golden/inputs/perm_twos.json",
            "--witness",
            "prop2",
            "--horizon",
            "12",
            "--levels",
            "4",
        ]
    ),
    case!(
        "criterion_product_extension",
        0,
        [
            "criterion",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--witness",
            "product-extension",
            "--horizon",
            "12",
            "--levels",
            "4",
            "--seed",
            "7",
        ]
    ),
    case!(
        "product_sim_iterate",
        0,
        [
            "product-sim",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--sequence",
            "[[\"1/8\"],[\"1/4\"]]",
            "--ops",
            "iterate-2",
        ]
    ),
    case!(
        "product_sim_chain",
        0,
        [
            "product-sim",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--sequence",
            "[[\"1/3\"],[\"1/5\"],[\"0\"]]",
            "--ops",
            "phi-psi,psi-phi,shrink-bound-5,c-tilde-2,phi,phi",
        ]
    ),
    case!(
        "product_sim_torus2",
        0,
        [
            "product-sim",
            "--map",
            "tests/golden/inputs/diagonal.json",
            "--sequence",
            "[[\"1/3\",\"1/4\"],[\"2/5\",\"0\"]]",
            "--ops",
            "psi,phi,iterate-3,shrink-bound-4",
        ]
    ),
    case!(
        "error_unknown_witness",
        2,
        [
            "criterion",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--witness",
            "prop9"
        ]
    ),
    case!(
        "error_dimension",
        2,
        [
            "iterate",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--point",
            "[\"1/8\",\"1/2\"]",
            "--r",
            "3"
        ]
    ),
    case!(
        "error_support",
        2,
        [
            "product-sim",
            "--map",
            "tests/golden/inputs/doubling.json",
            "--sequence",
            "[[\"1/8\"],[\"1/4\"],[\"1/2\"]]",
            "--ops",
            "iterate-1",
        ]
    ),
];

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(format!("{name}.json"))
}

/// Runs the binary and returns (exit code, stdout).
pub fn run_cli(args: &[&str], threads: usize) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_torusmix"))
        .args(args)
        .current_dir(manifest_dir())
        .env("TORUSMIX_THREADS", threads.to_string())
        .output()
        .expect("spawn torusmix");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn reserialize<T: Serialize + DeserializeOwned + PartialEq>(text: &str) -> Result<(), String> {
    let value: T = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let again = to_json(&value).map_err(|e| e.to_string())?;
    if again != text {
        return Err("re-serialized report differs".into());
    }
    let back: T = serde_json::from_str(&again).map_err(|e| e.to_string())?;
    if back != value {
        return Err("re-parsed report differs".into());
    }
    Ok(())
}

/// Parses a report back into its type and checks it re-serializes to the same bytes.
pub fn round_trip(case: &Case, text: &str) -> Result<(), String> {
    if case.exit != 0 {
        return reserialize::<ErrorBody>(text);
    }
    match case.args[0] {
        "classify" => reserialize::<ClassifyReport>(text),
        "iterate" => reserialize::<IterateReport>(text),
        "mix-verify" => reserialize::<MixVerifyReport>(text),
        "criterion" => reserialize::<CriterionRunReport>(text),
        "product-sim" => reserialize::<ProductSimReport>(text),
        other => Err(format!("no report type for {other}")),
    }
}

/// Checks one case: exit code, byte equality across two runs and thread
/// counts 1 and 8, agreement with the golden file, and JSON round trip.
/// With `UPDATE_GOLDEN` set the golden file is rewritten instead of compared.
pub fn check_case(case: &Case) -> Result<(), String> {
    let (code_a, a) = run_cli(case.args, 1);
    let (code_b, b) = run_cli(case.args, 1);
    let (code_c, c) = run_cli(case.args, 8);
    if [code_a, code_b, code_c] != [case.exit; 3] {
        return Err(format!(
            "exit codes {code_a}/{code_b}/{code_c}, expected {}: {a}",
            case.exit
        ));
    }
    if a != b {
        return Err("two runs differ".into());
    }
    if a != c {
        return Err("1 and 8 threads differ".into());
    }
    round_trip(case, &a)?;
    let path = golden_path(case.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &a).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != a {
        return Err(format!("output differs from {}", display(&path)));
    }
    Ok(())
}

fn display(p: &Path) -> String {
    p.strip_prefix(manifest_dir()).unwrap_or(p).display().to_string()
}

pub fn input(name: &str) -> PathBuf {
    manifest_dir().join(I).join(name)
}
