use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hurwitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurwitz")).args(args).output().expect("binary runs")
}

fn write_matrix(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn trace_and_quotient() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", r#"{"n":2,"re":[[1,0],[0,0.5]],"im":[[0,0],[0,0]]}"#);
    let b = write_matrix(dir.path(), "b.json", r#"{"n":2,"re":[[1,0],[0,0.25]],"im":[[0,0],[0,0]]}"#);
    let out = hurwitz(&["trace", &a, &b, "--m", "3", "--k", "1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // 3·(1 + 0.5²·0.25)
    assert!((v["trace"].as_f64().unwrap() - 3.1875).abs() < 1e-12);

    let out = hurwitz(&["quotient", &a, &b, "--k", "1", "--count", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["values"].as_array().unwrap().len(), 4);

    let out = hurwitz(&["m0", &a, &b, "--k", "1"]);
    assert!(out.status.success());
    assert!(stdout_json(&out)["m0"].as_u64().unwrap() >= 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", r#"{"n":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}"#);
    let b = write_matrix(dir.path(), "b.json", r#"{"n":2,"re":[[0,0],[0,1]],"im":[[0,0],[0,0]]}"#);
    let bad = write_matrix(dir.path(), "bad.json", r#"{"n":2,"re":[[1,2],[0,1]],"im":[[0,0],[0,0]]}"#);

    assert_eq!(hurwitz(&["m0", &a, &b, "--k", "1"]).status.code(), Some(2));
    assert_eq!(hurwitz(&["trace", &bad, &b, "--m", "3", "--k", "1"]).status.code(), Some(2));
    assert_eq!(hurwitz(&["trace", "/nonexistent.json", &b, "--m", "3", "--k", "1"]).status.code(), Some(2));
    assert_eq!(hurwitz(&["el-check", &a, &b, "--m", "5", "--k", "2", "--p", "inf"]).status.code(), Some(2));
    assert_eq!(hurwitz(&["verify", "--level", "slow"]).status.code(), Some(2));
    let big = write_matrix(dir.path(), "i.json", r#"{"n":1,"re":[[1]],"im":[[0]]}"#);
    assert_eq!(hurwitz(&["trace", &big, &big, "--m", "5000", "--k", "2500"]).status.code(), Some(3));
}

#[test]
fn el_commands() {
    let dir = tempfile::tempdir().unwrap();
    let h = 0.5f64.sqrt();
    let x = write_matrix(dir.path(), "x.json", &format!(r#"{{"n":2,"re":[[{h},0],[0,{h}]],"im":[[0,0],[0,0]]}}"#));
    let out = hurwitz(&["el-check", &x, &x, "--m", "5", "--k", "2", "--p", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["residual_a"].as_f64().unwrap() < 1e-12);

    let out = hurwitz(&["el-search", "--n", "2", "--m", "5", "--k", "2", "--p", "2", "--seed", "3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!(v["residuals"]["residual_a"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["seed"].as_u64(), Some(3));
}

#[test]
fn scan_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, format: &str| {
        let path = dir.path().join(name);
        let out = hurwitz(&[
            "scan", "--n", "3", "--k-list", "1,2,3", "--m-count", "40", "--samples", "20", "--seed", "42", "--out",
            path.to_str().unwrap(), "--format", format,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(path).unwrap()
    };
    let body = |s: String| s.lines().skip(1).map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(body(run("a.jsonl", "jsonl")), body(run("b.jsonl", "jsonl")));
    assert_eq!(run("a.csv", "csv"), run("b.csv", "csv"));

    let out = hurwitz(&["scan", "--n", "3", "--k-list", "1", "--m-count", "5", "--samples", "2", "--seed", "1", "--out", "/nonexistent/dir/x.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quick_verification_passes() {
    let out = hurwitz(&["verify", "--level", "quick"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("PASS oracle-triangle"));
}
