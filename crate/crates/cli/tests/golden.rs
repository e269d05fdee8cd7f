//! JSON reports checked against stored files. Set `UPDATE_GOLDEN=1` to rewrite
//! them after an intentional format change.

use std::path::{Path, PathBuf};

use mahler_cli::{run_newton, run_solve, RunOptions, Status};
use serde_json::{json, Value};

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn input(name: &str) -> String {
    std::fs::read_to_string(dir("data").join(format!("{name}.txt"))).unwrap()
}

fn check_golden(name: &str, actual: &Value) {
    let path = dir("golden").join(format!("{name}.json"));
    let rendered = serde_json::to_string_pretty(actual).unwrap() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &rendered).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let stored: Value = serde_json::from_str(&stored).unwrap();
    assert_eq!(&stored, actual, "{name}: report differs from {}", path.display());
}

fn verified() -> RunOptions {
    RunOptions {
        verify: true,
        ..RunOptions::default()
    }
}

#[test]
fn example_report() {
    let r = run_solve(&input("example_p2"), &verified());
    assert_eq!(r.status, Status::Success, "{}", r.pretty);
    let j = &r.json;
    assert_eq!(
        j["newton"]["slopes"],
        json!([{ "mu": "0", "r": 1 }, { "mu": "1", "r": 1 }])
    );
    assert_eq!(
        j["newton"]["exponents"],
        json!([[{ "c": "1", "m": 1 }], [{ "c": "1", "m": 1 }]])
    );
    assert_eq!(j["newton"]["plan"]["nu"], json!(["0", "2"]));
    assert_eq!(j["solutions"].as_array().unwrap().len(), 2);
    assert_eq!(j["verification"]["passed"], json!(true));
    // y_1 = -e_1
    let y1 = &j["solutions"][0]["solution"];
    assert_eq!(y1[0]["c"], json!("1"));
    assert_eq!(
        y1[0]["terms"][0]["series"]["terms"],
        json!([{ "exp": "0", "coeff": "-1" }])
    );
    check_golden("example_p2", j);
}

#[test]
fn example_report_p3() {
    let r = run_solve(&input("example_p3"), &verified());
    assert_eq!(r.status, Status::Success, "{}", r.pretty);
    assert_eq!(
        r.json["newton"]["slopes"],
        json!([{ "mu": "0", "r": 1 }, { "mu": "1/2", "r": 1 }])
    );
    check_golden("example_p3", &r.json);
}

#[test]
fn phi_minus_one_report() {
    let r = run_solve(&input("phi_minus_1"), &verified());
    assert_eq!(r.status, Status::Success);
    let sols = r.json["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(
        sols[0]["solution"][0]["terms"][0]["series"]["terms"],
        json!([{ "exp": "0", "coeff": "1" }])
    );
    check_golden("phi_minus_1", &r.json);
}

#[test]
fn newton_report() {
    let r = run_newton(&input("example_p2"), &RunOptions::default());
    assert_eq!(r.status, Status::Success);
    check_golden("example_p2_newton", &r.json);
}

#[test]
fn partial_basis_report() {
    let r = run_solve(&input("irrational"), &verified());
    assert_eq!(r.status, Status::Partial);
    assert_eq!(r.exit_code(), 3);
    assert_eq!(r.json["partial"]["solved_order"], json!(0));
    assert!(r.pretty.contains("warning: partial basis"));
    check_golden("irrational", &r.json);
}
