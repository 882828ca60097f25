use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn circuit(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/circuits").join(name)
}

fn clockforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clockforge")).args(args).env_remove("CLOCKFORGE_DENSE_CAP").output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn build_dumps_terms_with_audit() {
    let cat = circuit("cat3.json");
    let out = clockforge(&["build", "--circuit", cat.to_str().unwrap(), "--clock-dim", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let dump: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(dump["audit"]["max_locality"], 5);
    assert_eq!(dump["terms"].as_array().unwrap().len(), dump["audit"]["terms"].as_u64().unwrap() as usize);
    for t in dump["terms"].as_array().unwrap() {
        assert!(t["tag"].is_string() && t["support"].is_array() && t["matrix"].is_array());
    }
}

#[test]
fn build_two_dimensional_clock_stays_within_seven() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("h.json");
    let rep = dir.path().join("r.json");
    let cat = circuit("brickwork8.json");
    let out = clockforge(&[
        "build",
        "--circuit",
        cat.to_str().unwrap(),
        "--clock-dim",
        "2",
        "--no-out",
        "--out",
        dump.to_str().unwrap(),
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    let c = check(&r, "max_locality");
    assert!(c["value"].as_f64().unwrap() <= 7.0);
    assert_eq!(c["bound"], 7.0);
    assert!(dump.exists());
}

#[test]
fn malformed_circuit_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\":[2,2],\n \"gates\":[{\"label\":\"H\",").unwrap();
    let out = clockforge(&["build", "--circuit", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_circuit_file_and_unknown_flags_exit_two() {
    assert_eq!(clockforge(&["build", "--circuit", "/nonexistent/c.json"]).status.code(), Some(2));
    assert_eq!(clockforge(&["spectrum", "--bogus"]).status.code(), Some(2));
    assert_eq!(clockforge(&[]).status.code(), Some(2));
    assert_eq!(clockforge(&["--help"]).status.code(), Some(0));
}

#[test]
fn lngs_rejects_eps_outside_the_theorem_range() {
    let out = clockforge(&["lngs", "--eps", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/48"));
    let out = clockforge(&["lngs", "--eps", "0.01", "--delta", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lngs_exact_state_report() {
    let out = clockforge(&["lngs", "--n", "5", "--eps", "0", "--delta", "0", "--bound", "corrected"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((check(&r, "certificate_margin")["value"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(check(&r, "ground_degeneracy")["value"], 1.0);
    assert_eq!(check(&r, "exact_ab_excess")["pass"], true);
    // The stated pair bound fails on the exact ground state and is reported, not gated.
    let stated = check(&r, "exact_ab_stated");
    assert_eq!(stated["pass"], false);
    assert_eq!(stated["gating"], false);
}

#[test]
fn lngs_stated_bound_decides_the_exit_code_by_default() {
    let out = clockforge(&["lngs", "--n", "4", "--eps", "0", "--delta", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact_ab_stated"));
}

#[test]
fn lngs_reports_are_deterministic() {
    let args = ["lngs", "--n", "5", "--eps", "0.02", "--trials", "20", "--seed", "11", "--bound", "corrected"];
    let strip = |o: &Output| {
        let mut r = report(o);
        r["wall_time_s"] = Value::Null;
        serde_json::to_string(&r).unwrap()
    };
    let a = clockforge(&args);
    let b = clockforge(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(strip(&a), strip(&b));
    let c = clockforge(&["lngs", "--n", "5", "--eps", "0.02", "--trials", "20", "--seed", "12", "--bound", "corrected"]);
    assert_ne!(strip(&a), strip(&c));
}

#[test]
fn qlwc_rejects_errors_beyond_the_budget() {
    let out = clockforge(&["qlwc", "--error", "erase:state:2,5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    let out = clockforge(&["qlwc", "--error", "erase:clock:0", "--error", "erase:state:1,clock"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qlwc_bell_message_with_explicit_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("checks.csv");
    let out = clockforge(&[
        "qlwc",
        "--message",
        "bell",
        "--error",
        "erase:state:3",
        "--error",
        "dephase:clock:4",
        "--error",
        "random:state:0",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let p = &r["details"]["parameters"];
    assert_eq!(p["w"], 9);
    assert_eq!(p["k_wait"], 180);
    assert!(check(&r, "bell/max_trace_distance")["value"].as_f64().unwrap() <= 0.5);
    let rows = std::fs::read_to_string(csv).unwrap();
    assert!(rows.starts_with("name,value,bound,relation,pass,gating"));
    assert_eq!(rows.lines().count(), 1 + r["checks"].as_array().unwrap().len());
}

#[test]
fn lightcone_disjoint_supports_factorize() {
    let c = circuit("brickwork8.json");
    let out = clockforge(&["lightcone", "--circuit", c.to_str().unwrap(), "--target", "0", "--other", "7", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(check(&r, "factorization_discrepancy")["value"].as_f64().unwrap() <= 1e-10);
    assert_eq!(r["details"]["relation"]["outside_shadow"], true);
    let out = clockforge(&["lightcone", "--circuit", c.to_str().unwrap(), "--target", "2", "--other", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["details"]["factorization"]["diagnostic"], true);
}

#[test]
fn spectrum_and_traceorder() {
    let c = circuit("cat3.json");
    let out = clockforge(&["spectrum", "--circuit", c.to_str().unwrap(), "--no-out", "--count", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["details"]["eigenvalues"][0].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(r["details"]["ground_degeneracy"], 1);
    let out = clockforge(&["traceorder", "--circuit", c.to_str().unwrap(), "--traced", "1", "--clock-dim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let out = clockforge(&["traceorder", "--circuit", c.to_str().unwrap(), "--witness", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dense_cap_environment_variable_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_clockforge"))
        .args(["lngs", "--n", "4", "--bound", "corrected"])
        .env("CLOCKFORGE_DENSE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["name"] != "ground_degeneracy"));
    assert!(r["notes"][0].as_str().unwrap().contains("dense cap"));
}
