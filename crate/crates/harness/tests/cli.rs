use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn calkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_calkin"))
        .args(args)
        .env_remove("CALKIN_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SINGLE_PAIR: &str = r#"{"symbols":[[
  {"rows":2,"cols":2,"entries":[[1,0],[0.5,0],[0,0],[0.3,0.1]]},
  {"rows":2,"cols":2,"entries":[[0.8,0],[0,0],[0.2,0],[0.4,0]]}]]}"#;

const THREE_PAIRS: &str = r#"{"symbols":[
  [{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[0,0]]},{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[0,0]]}],
  [{"rows":2,"cols":2,"entries":[[0,0],[1,0],[0,0],[0,0]]},{"rows":2,"cols":2,"entries":[[0,0],[0,0],[1,0],[0,0]]}],
  [{"rows":2,"cols":2,"entries":[[2,0],[2,0],[0,0],[0,0]]},{"rows":2,"cols":2,"entries":[[0,0],[0,0],[0,0],[1,0]]}]]}"#;

#[test]
fn tensor_of_halves() {
    let r = json(&calkin(&["seq", "tensor", "--a", "geo:0.5", "--b", "geo:0.5", "-n", "6"]));
    let values: Vec<f64> = serde_json::from_value(r["result"]["values"].clone()).unwrap();
    assert_eq!(values, [1.0, 0.5, 0.5, 0.25, 0.25, 0.25]);
    assert_eq!(r["result"]["operation"], "seqkit::tensor_prefix");
    assert_eq!(r["config"]["seed"], 1);
}

#[test]
fn rearrange_mixed_entries() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "vals.json", "[0.5, [0, -2], -1, [3, 4]]");
    let r = json(&calkin(&["seq", "rearrange", "--in", &input]));
    let values: Vec<f64> = serde_json::from_value(r["result"]["values"].clone()).unwrap();
    assert_eq!(values, [5.0, 2.0, 1.0, 0.5]);
}

#[test]
fn power_is_not_dominated_by_geometric() {
    let r = json(&calkin(&["seq", "dominate", "--a", "pow:1", "--b", "geo:0.5", "--horizon", "60"]));
    assert_eq!(r["result"]["domination"]["verdict"], "not_at_horizon");
    // 2^(n-1)/n first exceeds 1e6 at n = 26
    assert_eq!(r["result"]["domination"]["index"], 26);
    let r = json(&calkin(&["seq", "dominate", "--a", "geo:0.5", "--b", "pow:1", "--horizon", "60"]));
    assert_eq!(r["result"]["domination"]["verdict"], "dominated");
}

#[test]
fn stability_examples() {
    for (seq, decision) in [
        ("geo:0.5", "not_stable_at_horizon"),
        ("pow:1", "not_stable_at_horizon"),
        ("loginv", "stable_certified"),
    ] {
        let r = json(&calkin(&["stability", "--seq", seq]));
        assert_eq!(r["result"]["verdict"]["decision"]["decision"], decision, "{seq}");
        assert_eq!(r["result"]["consistent"], true);
    }
    let r = json(&calkin(&["stability", "--seq", "loginv"]));
    assert_eq!(r["result"]["band_growth"]["verdict"], "holds");
    assert_eq!(r["result"]["depth"], 4);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"symbols\": 3}");
    for args in [
        vec!["seq", "tensor", "--a", "geo:x", "--b", "geo:0.5", "-n", "3"],
        vec!["seq", "tensor", "--a", "nonsense", "--b", "geo:0.5", "-n", "3"],
        vec!["seq", "tensor", "--a", "finite:0.5,1", "--b", "geo:0.5", "-n", "3"],
        vec!["elemop", "hsnums", "--op", &bad],
        vec!["stability", "--seq", "geo:0.5", "--bogus"],
        vec!["verify-all", "--max-dim", "1"],
    ] {
        assert_eq!(calkin(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn short_prefix_exits_3() {
    let out = calkin(&["seq", "tensor", "--a", "explicit:1,0.5", "--b", "geo:0.5", "-n", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient prefix"));
}

#[test]
fn elemop_commands() {
    let dir = tempfile::tempdir().unwrap();
    let single = write(dir.path(), "single.json", SINGLE_PAIR);
    let three = write(dir.path(), "three.json", THREE_PAIRS);

    let r = json(&calkin(&["elemop", "bounds", "--op", &single, "--omega", "0.6667"]));
    let rows = r["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let (l, u, e) = (row["lower"].as_f64().unwrap(), row["upper"].as_f64().unwrap(), row["envelope"].as_f64().unwrap());
        assert!(l <= u + 1e-9 && u <= e + 1e-9);
    }

    let r = json(&calkin(&["elemop", "hsnums", "--op", &single]));
    assert!(r["result"]["product_law_error"].as_f64().unwrap() < 1e-12);

    // the third A is 2 A_1 + 2 A_2
    let r = json(&calkin(&["elemop", "minimal", "--op", &three]));
    assert_eq!(r["result"]["length"], 2);

    let r = json(&calkin(&["elemop", "recover", "--op", &three, "--target", "3", "--seed", "7"]));
    assert!(r["result"]["recovery"]["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["result"]["recovery"]["target"], 2);

    assert_eq!(calkin(&["elemop", "recover", "--op", &three, "--target", "4"]).status.code(), Some(2));
    assert_eq!(calkin(&["elemop", "bounds", "--op", &three]).status.code(), Some(2));
}

#[test]
fn zero_operator_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(
        dir.path(),
        "zero.json",
        r#"{"symbols":[[{"rows":1,"cols":1,"entries":[[0,0]]},{"rows":1,"cols":1,"entries":[[1,0]]}]]}"#,
    );
    let r = json(&calkin(&["elemop", "minimal", "--op", &zero]));
    assert_eq!(r["result"]["zero_operator"], true);
}

#[test]
fn reports_are_byte_stable() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&d1, &d2] {
        let out = dir.path().to_str().unwrap();
        for args in [
            vec!["verify-all", "--seed", "11", "--out", out],
            vec!["stability", "--seq", "pow:2", "--out", out, "--format", "csv"],
        ] {
            assert!(calkin(&args).status.success());
        }
    }
    for name in ["verify-all.json", "stability.csv"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_calkin"))
        .args(["seq", "tensor", "--a", "geo:0.5", "--b", "pow:1", "-n", "2"])
        .env("CALKIN_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["seed"], 42);
}

#[test]
fn tight_tolerance_is_flagged() {
    let out = calkin(&["verify-all", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(4));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let criteria = r["result"]["criteria"].as_array().unwrap();
    assert!(criteria.iter().any(|c| c["passed"] == false));
    assert!(criteria.iter().filter(|c| c["passed"] == false).all(|c| c["tolerance_induced"] == true));
}

#[test]
fn other_seed_same_pattern() {
    let r = json(&calkin(&["verify-all", "--seed", "2024"]));
    assert_eq!(r["result"]["all_passed"], true);
}
