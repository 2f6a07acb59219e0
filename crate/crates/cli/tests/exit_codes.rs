use std::process::{Command, Output};

use serde_json::Value;

fn tlcalc(args: &[&str], tolerance: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tlcalc"));
    cmd.args(args).env_remove("TLCALC_TOLERANCE");
    if let Some(t) = tolerance {
        cmd.env("TLCALC_TOLERANCE", t);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn eval_prints_entries() {
    let out = tlcalc(&["eval", "cup ; cap", "--dim", "5"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["entries"], serde_json::json!([[1.0, 0.0]]));
}

#[test]
fn eval_reads_files_and_registries() {
    let dir = tempfile::tempdir().unwrap();
    let expr = dir.path().join("x.tl");
    std::fs::write(&expr, "ket(v) ; op(M)").unwrap();
    let reg = dir.path().join("r.json");
    std::fs::write(
        &reg,
        r#"{"d": 2, "matrices": {"M": [[[0,0],[1,0]],[[1,0],[0,0]]]}, "vectors": {"v": [[1,0],[0,0]]}}"#,
    )
    .unwrap();
    let out = tlcalc(
        &["eval", expr.to_str().unwrap(), "--dim", "2", "--registry", reg.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(2), Some(1)));
    assert_eq!(v["entries"], serde_json::json!([[0.0, 0.0], [1.0, 0.0]]));

    let wrong_dim = tlcalc(&["eval", "cup", "--dim", "3", "--registry", reg.to_str().unwrap()], None);
    assert_eq!(wrong_dim.status.code(), Some(2));
}

#[test]
fn verify_passes_and_fails() {
    let out = tlcalc(&["verify", "snake_left", "--dim", "3", "--seed", "1"], None);
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&out);
    let r = &reports[0];
    for field in ["identity_id", "d", "seed", "residual", "passed"] {
        assert!(r.get(field).is_some(), "missing {field}");
    }
    assert_eq!(r["passed"], Value::Bool(true));

    let strict = tlcalc(&["verify", "trace_pair", "--dim", "3", "--seed", "1"], Some("1e-300"));
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(json(&strict)[0]["passed"], Value::Bool(false));
}

#[test]
fn named_protocol_checks() {
    let out = tlcalc(&["verify", "teleport", "--dim", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 4);
    assert_eq!(tlcalc(&["verify", "no_such_identity", "--dim", "2"], None).status.code(), Some(2));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let out = tlcalc(&["eval", "cup ; id(3)", "--dim", "2"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot compose"));
    assert_eq!(tlcalc(&["eval", "op(A, hermitian)"], None).status.code(), Some(2));
    assert_eq!(tlcalc(&["eval", "op(A)", "--dim", "2"], None).status.code(), Some(2));
    assert_eq!(tlcalc(&["bogus"], None).status.code(), Some(2));
    assert_eq!(tlcalc(&["verify", "all"], Some("zero")).status.code(), Some(2));
}

#[test]
fn too_large_exits_3() {
    let out = tlcalc(&["eval", "id(12)", "--dim", "5"], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn normalize_prints_a_trace() {
    let out = tlcalc(&["normalize", "cup * cup ; id(1) * cap * id(1)", "--dim", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["input"], "cup * cup ; id(1) * cap * id(1)");
    let rules: Vec<&str> = v["trace"].as_array().unwrap().iter().map(|s| s["rule"].as_str().unwrap()).collect();
    assert_eq!(rules, ["straighten", "absorb"]);
    assert!(v["normal_form"].as_str().unwrap().contains("∪"));
}

#[test]
fn demos_report_residuals() {
    for (name, steps) in [("teleport", 11), ("densecode", 1), ("swap", 5)] {
        let out = tlcalc(&["demo", name, "--dim", "3"], None);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert_eq!(v["demo"], name);
        assert_eq!(v["steps"].as_array().unwrap().len(), steps, "{name}");
        assert_eq!(v["passed"], Value::Bool(true));
    }
}
