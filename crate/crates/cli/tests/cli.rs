use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn amalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalg")).args(args).env_remove("AMALG_OUT_DIR").output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    let out = amalg(args);
    out.status.code().expect("exit code")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = amalg(args);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn nc_count_prints_catalan() {
    let out = amalg(&["nc", "count", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "132");
    let v = json(&["nc", "list", "--n", "4", "--json"]);
    assert_eq!(v["result"]["count"], 14);
    assert_eq!(code(&["nc", "count", "--n", "40"]), 2);
}

#[test]
fn factorization_exit_codes() {
    assert_eq!(code(&["freeness", "factorization", "--model", &fixture("free_over_d.json"), "--order", "4"]), 0);
    assert_eq!(code(&["freeness", "factorization", "--model", &fixture("not_d_valued.json"), "--order", "3"]), 1);
    assert_eq!(code(&["freeness", "factorization", "--model", &fixture("missing.json")]), 2);
}

#[test]
fn freeness_subcommands() {
    assert_eq!(code(&["freeness", "mixed", "--model", &fixture("free_over_d.json"), "--order", "4"]), 0);
    assert_eq!(code(&["freeness", "restriction", "--model", &fixture("free_over_d.json"), "--order", "4"]), 0);
    assert_eq!(code(&["freeness", "rcyclic", "--model", &fixture("rcyclic_diagonal.json"), "--order", "4"]), 0);
    let v = json(&["freeness", "rcyclic", "--model", &fixture("rcyclic_constant.json"), "--order", "2"]);
    assert_eq!(v["pass"], false);
    let fam = &v["result"]["families"][0];
    assert!((fam["worst"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // No groups in this model.
    assert_eq!(code(&["freeness", "mixed", "--model", &fixture("not_d_valued.json")]), 2);
}

#[test]
fn missing_context_is_an_error() {
    let out = amalg(&["algebra", "check", "--context", &fixture("nope.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
    assert_eq!(code(&["algebra", "check", "--context", &fixture("context_diag.json")]), 0);
    // A matrix model without its context.
    assert_eq!(code(&["cumulant", "--model", &fixture("matrix_model.json"), "--indices", "0,0"]), 2);
}

#[test]
fn cumulant_and_fock_moment() {
    let v = json(&[
        "cumulant", "--context", &fixture("context_diag.json"), "--model", &fixture("matrix_model.json"),
        "--indices", "0,0,0", "--target", "B", "--coeffs", &fixture("coeffs_two.json"),
    ]);
    assert_eq!(v["result"]["value"].as_array().unwrap().len(), 2);
    let v = json(&["fock", "moment", "--model", &fixture("semicircle.json"), "--indices", "0,0,0,0"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["result"]["value"][0][0], 2.0);
}

#[test]
fn liberation_subcommands() {
    assert_eq!(code(&["liberation", "conjugate", "--model", &fixture("semicircle.json"), "--order", "4", "--tol", "1e-9"]), 0);
    assert_eq!(code(&["liberation", "conjugate", "--model", &fixture("semicircle_wrong.json"), "--order", "2"]), 1);
    assert_eq!(code(&["liberation", "conjugate", "--model", &fixture("hadamard.json"), "--order", "3"]), 0);
    assert_eq!(code(&["liberation", "commutator", "--model", &fixture("hadamard.json")]), 0);
    let v = json(&["liberation", "commutator", "--model", &fixture("coupled.json")]);
    assert_eq!(v["pass"], false);
    assert!(v["result"]["l2_norm"].as_f64().unwrap() > 0.1);
    assert_eq!(code(&["liberation", "gradient", "--model", &fixture("coupled.json"), "--order", "2"]), 0);
}

#[test]
fn bandmatrix_subcommands() {
    let v = json(&["bandmatrix", "limit", "--profile", &fixture("profile_const.csv")]);
    let m: Vec<f64> = serde_json::from_value(v["result"]["moments"].clone()).unwrap();
    assert_eq!(m.len(), 9);
    assert!((m[8] - 14.0).abs() < 1e-10);
    let v = json(&["bandmatrix", "limit", "--profile", &fixture("profile_sum.csv"), "--order", "4"]);
    assert_eq!(v["result"]["verdict"]["constant_rows"], false);
    let out = amalg(&["bandmatrix", "limit", "--profile", &fixture("profile_bad.csv")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("profile_bad.csv:2"));
    assert_eq!(code(&["bandmatrix", "limit", "--profile", &fixture("profile_const.csv"), "--order", "3"]), 2);
}

#[test]
fn reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let args = [
            "bandmatrix", "simulate", "--profile", &fixture("profile_const.csv"), "--n", "48", "--trials", "3",
            "--seed", seed, "--out", path.to_str().unwrap(),
        ];
        assert_eq!(code(&args), 0);
        std::fs::read(path).unwrap()
    };
    let a = run("a.json", "7");
    assert_eq!(a, run("b.json", "7"));
    assert_ne!(a, run("c.json", "8"));
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn csv_output_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_amalg"))
        .args(["--format", "csv", "bandmatrix", "limit", "--profile", &fixture("profile_const.csv"), "--order", "4"])
        .env("AMALG_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("bandmatrix_limit.csv")).unwrap();
    assert!(text.starts_with("order,moment\n"));
    assert_eq!(text.lines().count(), 6);
    assert_eq!(String::from_utf8_lossy(&out.stdout), text);
}
