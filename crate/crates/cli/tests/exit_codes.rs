use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str], stdin: Option<&str>) -> (i32, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mahler"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn verified_example_succeeds() {
    let (code, out) = run(&["solve", &data("example_p2.txt"), "--verify"], None);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("2 of 2 solutions: PASSED"));
}

#[test]
fn verification_failure() {
    // no uncertified gap is narrow enough for ε = 1/10^6
    let (code, out) = run(
        &[
            "solve",
            &data("example_p2.txt"),
            "--verify",
            "--epsilon",
            "1/1000000",
            "--json",
        ],
        None,
    );
    assert_eq!(code, 1, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verification"]["passed"], serde_json::json!(false));
    assert_eq!(v["status"], serde_json::json!("failure"));
}

#[test]
fn input_errors() {
    let (code, out) = run(&["solve", "-", "--json"], Some("p = 2\na[0] = z^^2\na[1] = 1\n"));
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], serde_json::json!("syntax"));
    assert_eq!(
        (v["error"]["line"].as_u64(), v["error"]["col"].as_u64()),
        (Some(2), Some(10))
    );

    let (code, _) = run(&["solve", "-"], Some("p = 2\na[0] = z^(x)\na[1] = 1\n"));
    assert_eq!(code, 2);
    let (code, _) = run(&["solve", "-"], Some("p = 2\na[0] = 1/(z - z)\na[1] = 1\n"));
    assert_eq!(code, 2);
    let (code, _) = run(&["solve", "/nonexistent/equation.txt"], None);
    assert_eq!(code, 2);
}

#[test]
fn partial_basis_exit_code() {
    let (code, out) = run(&["solve", &data("irrational.txt"), "--verify"], None);
    assert_eq!(code, 3, "{out}");
    let (code, _) = run(&["newton", &data("irrational.txt")], None);
    assert_eq!(code, 3);
}

#[test]
fn selftest_passes() {
    let (code, out) = run(
        &[
            "selftest",
            "--seed",
            "5",
            "--count",
            "6",
            "--precision",
            "4",
            "--depth",
            "4",
        ],
        None,
    );
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("6/6 passed"));
}
