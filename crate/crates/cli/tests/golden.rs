mod common;

use common::{check_case, CASES};

#[test]
fn golden_outputs_are_stable() {
    let failures: Vec<String> = CASES
        .iter()
        .filter_map(|case| check_case(case).err().map(|e| format!("{}: {e}", case.name)))
        .collect();
    assert!(failures.is_empty(), "golden failures:\n{}", failures.join("\n"));
}

#[test]
fn every_subcommand_has_a_golden_case() {
    for sub in ["classify", "iterate", "mix-verify", "criterion", "product-sim"] {
        assert!(CASES.iter().any(|c| c.exit == 0 && c.args[0] == sub), "{sub}");
    }
}
