//! End-to-end tests of the `hyperseed` binary: exit codes, JSON report
//! schema, file formats, and the catalog override environment variable.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperseed"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn list_shows_the_catalog() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in ["ramanujan-2-over-pi", "levrie", "mishev-4f3", "derived-alt-h2n"] {
        assert!(text.contains(id), "list output missing {id}");
    }
}

#[test]
fn verify_emits_json_report_and_exit_zero() {
    let out = run(&["verify", "ramanujan-2-over-pi", "--digits", "25", "--format", "json"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["id"], "ramanujan-2-over-pi");
    assert!(report["achieved_digits"].as_u64().unwrap() >= 25);
    assert_eq!(report["pass"], true);
    // values are strings, not floats
    assert!(report["lhs_value"].is_string());
    assert!(report["lhs_value"].as_str().unwrap().starts_with("0.63661977236758134307"));
}

#[test]
fn verify_parametric_identity() {
    let out = run(&["verify", "levrie", "--param", "k=4", "--digits", "15"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", "mishev-4f3", "--param", "a=2/3", "--param", "n=5"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("exact"));
}

#[test]
fn transform_delta_gives_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("seq.txt");
    std::fs::write(&input, "1/1\n0/1\n0/1\n0/1\n").unwrap();
    let out = run(&["transform", "--a", "1/2", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1/1\n1/1\n1/1\n1/1\n");

    // with an output file, and the composed reconstruction returns the input
    let outfile = dir.path().join("out.txt");
    let out = run(&[
        "transform",
        "--a",
        "5/7",
        "--input",
        input.to_str().unwrap(),
        "--output",
        outfile.to_str().unwrap(),
        "--inverse",
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&outfile).unwrap(), "1/1\n0/1\n0/1\n0/1\n");
}

#[test]
fn eval_sums_a_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"upper": ["1/2","1/2","1/2","5/4"], "lower": ["1/4","1","1"], "argument": "-1", "weight": "none"}"#,
    )
    .unwrap();
    let out = run(&["eval", "--input", spec.to_str().unwrap(), "--digits", "15", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["value"].as_str().unwrap().starts_with("0.636619772367581"));
    assert_eq!(v["method"], "accelerated");
    assert_eq!(v["converged"], true);

    // a terminating spec takes the exact path
    let term = dir.path().join("term.json");
    std::fs::write(
        &term,
        r#"{"upper": ["-3", "7/2"], "lower": ["1"], "argument": "1", "weight": "none"}"#,
    )
    .unwrap();
    let out = run(&["eval", "--input", term.to_str().unwrap(), "--digits", "10", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["method"], "exact");
    assert!(v["value"].as_str().unwrap().starts_with("-0.3125"));
}

#[test]
fn derive_with_check_verifies_the_record() {
    let out = run(&[
        "derive",
        "--family",
        "inv-square-factorial",
        "--param",
        "a=1/2",
        "--param",
        "n=-1/2",
        "--digits",
        "18",
        "--check",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // two JSON documents: the record, then the report
    let text = stdout(&out);
    assert!(text.contains("\"id\": \"mishev-4f3\""));
    assert!(text.contains("0.6366197723675813430"));
}

#[test]
fn usage_errors_exit_two() {
    // unknown id
    let out = run(&["verify", "no-such-id"]);
    assert_eq!(out.status.code(), Some(2));
    // bad rational syntax (decimals rejected)
    let out = run(&["verify", "levrie", "--param", "k=0.5"]);
    assert_eq!(out.status.code(), Some(2));
    // missing input file
    let out = run(&["transform", "--a", "1/2", "--input", "/nonexistent/seq.txt"]);
    assert_eq!(out.status.code(), Some(2));
    // family parameter missing
    let out = run(&["derive", "--family", "pochhammer-pair"]);
    assert_eq!(out.status.code(), Some(2));
    // inadmissible transform parameter
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("seq.txt");
    std::fs::write(&input, "1/1\n").unwrap();
    let out = run(&["transform", "--a", "-3", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_identity_from_custom_catalog_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("catalog.json");
    std::fs::write(
        &catalog,
        r#"[{
            "id": "wrong-claim",
            "anchor": "deliberately false identity",
            "mode": "numeric",
            "params": [],
            "lhs": {"upper": ["1", "1"], "lower": ["2"], "argument": "-1", "weight": "none"},
            "rhs": "(div 1 pi)",
            "sweeps": [{}]
        }]"#,
    )
    .unwrap();
    let out = bin()
        .env("HYPERSEED_CATALOG", catalog.to_str().unwrap())
        .args(["verify", "wrong-claim", "--digits", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));

    // the same file yields a passing run once the closed form is right
    std::fs::write(
        &catalog,
        r#"[{
            "id": "right-claim",
            "anchor": "alternating harmonic series",
            "mode": "numeric",
            "params": [],
            "lhs": {"upper": ["1", "1"], "lower": ["2"], "argument": "-1", "weight": "none"},
            "rhs": "ln2",
            "sweeps": [{}]
        }]"#,
    )
    .unwrap();
    let out = bin()
        .env("HYPERSEED_CATALOG", catalog.to_str().unwrap())
        .args(["verify", "right-claim", "--digits", "20"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_all_passes_at_fifteen_digits() {
    let out = run(&["verify-all", "--digits", "15"]);
    assert!(out.status.success(), "stdout: {}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("verifications passed"));
    assert!(!text.contains("FAIL"));
    // fixed ordering by id: the binomial-form entry precedes its 4F3 twin
    let first = text.find("ramanujan-2-over-pi").unwrap();
    let second = text.find("ramanujan-as-4f3").unwrap();
    assert!(first < second);
}

#[test]
fn json_reports_are_idempotent_modulo_elapsed_time() {
    let once = run(&["verify", "exotic-2sqrt2-3", "--digits", "12", "--format", "json"]);
    let twice = run(&["verify", "exotic-2sqrt2-3", "--digits", "12", "--format", "json"]);
    let mut a: serde_json::Value = serde_json::from_str(&stdout(&once)).unwrap();
    let mut b: serde_json::Value = serde_json::from_str(&stdout(&twice)).unwrap();
    a["elapsed_ms"] = 0.into();
    b["elapsed_ms"] = 0.into();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn sequence_files_accept_comments() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("seq.txt");
    std::fs::write(&input, "# leading comment\n1/1 # delta\n\n0/1\n").unwrap();
    let out = run(&["transform", "--a", "1/2", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1/1\n1/1\n");
    let _ = Path::new("unused");
}
