use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cshor(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_cshor")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let r = cshor(&full);
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&r.stdout).expect("valid json")
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cshor-test-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn orders_csv_for_33() {
    let r = cshor(&["tables", "orders", "--N", "33", "--format", "csv"]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "a,r");
    assert_eq!(lines.len(), 20);
    assert!(lines.contains(&"4,5"));
}

#[test]
fn orders_rejects_non_semiprime() {
    assert_eq!(cshor(&["tables", "orders", "--N", "25"]).code, 2);
    assert_eq!(cshor(&["tables", "orders", "--N", "30"]).code, 2);
}

#[test]
fn separability_csv_ends_at_uniform() {
    let r = cshor(&["tables", "separability", "--m", "3", "--k", "3", "--format", "csv"]);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(*lines.last().unwrap(), "8,0.125");
}

#[test]
fn allowed_periods_has_thirteen_rows() {
    let r = cshor(&["tables", "allowed-periods", "--max-N", "90", "--format", "csv"]);
    assert_eq!(r.stdout.lines().count(), 14);
    assert!(r.stdout.contains("7,11,77,30,2 3 5 6 10 15 30"));
}

#[test]
fn diff_paper_passes_for_all_tables() {
    for args in [
        &["tables", "orders", "--N", "21"][..],
        &["tables", "orders", "--N", "33"],
        &["tables", "allowed-periods", "--max-N", "90"],
        &["tables", "probabilities"],
        &["tables", "separability"],
        &["circuit", "verify", "--all"],
        &["circuit", "cost", "--all"],
    ] {
        let mut full = args.to_vec();
        full.push("--diff-paper");
        let r = cshor(&full);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stdout);
        assert!(r.stdout.contains("reference diff: PASS"));
    }
}

#[test]
fn probability_diff_reports_known_erratum() {
    let r = cshor(&["tables", "probabilities", "--diff-paper"]);
    assert!(r.stdout.contains("known erratum: p=5 k=3"));
}

#[test]
fn diff_paper_without_golden_is_invalid() {
    assert_eq!(cshor(&["tables", "orders", "--N", "35", "--diff-paper"]).code, 2);
}

#[test]
fn circuit_cost_line() {
    let r = cshor(&["circuit", "cost", "--id", "f4_21"]);
    assert_eq!(r.stdout.trim(), "N_T=2 N_CN=12 qcost=24");
}

#[test]
fn circuit_verify_exit_codes() {
    assert_eq!(cshor(&["circuit", "verify", "--id", "f2_15"]).code, 0);
    let dir = scratch("verify");
    let r = cshor(&["tables", "truth", "--a", "4", "--N", "15", "--n-in", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let table = dir.join("truth.json");
    let r = cshor(&["circuit", "verify", "--id", "f2_15", "--table", table.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("x=1: expected y=4, got y=2"));
}

#[test]
fn as_drawn_erratum_fails_verification() {
    assert_eq!(cshor(&["circuit", "verify", "--id", "f4_33_full", "--as-drawn"]).code, 1);
    assert_eq!(cshor(&["circuit", "verify", "--id", "f4_21_full", "--as-drawn"]).code, 1);
}

#[test]
fn circuit_file_round_trip() {
    let dir = scratch("file");
    let r = cshor(&["synth", "--a", "2", "--N", "15", "--out", dir.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let circuit = dir.join("circuit.json");
    let table = dir.join("synth.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    let table_path = dir.join("table.json");
    std::fs::write(&table_path, doc["table"].to_string()).unwrap();
    let r = cshor(&["circuit", "verify", "--file", circuit.to_str().unwrap(), "--table", table_path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(cshor(&["circuit", "verify", "--file", circuit.to_str().unwrap()]).code, 2);
}

#[test]
fn unknown_id_and_bad_file() {
    assert_eq!(cshor(&["circuit", "show", "--id", "f9_99"]).code, 2);
    let dir = scratch("bad");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(cshor(&["circuit", "show", "--file", bad.to_str().unwrap()]).code, 2);
}

#[test]
fn synth_examples() {
    let v = json(&["synth", "--a", "4", "--N", "21", "--compile", "full"]);
    assert_eq!(v["result"]["table"]["n_in"], 2);
    assert_eq!(v["result"]["table"]["n_out"], 2);
    let v = json(&["synth", "--a", "4", "--N", "33", "--compile", "affine"]);
    assert_eq!(v["result"]["g"], serde_json::json!({"kind": "affine", "c": 1, "d": 3}));
    assert!(v["result"]["g_description"].as_str().unwrap().contains("(y - 1) / 3"));
    let v = json(&["synth", "--a", "2", "--N", "15", "--compile", "none"]);
    assert_eq!(v["result"]["table"]["n_in"], 2);
    assert_eq!(v["result"]["table"]["n_out"], 4);
    assert_eq!(v["result"]["reference"]["figure"], "f2_15");
}

#[test]
fn synth_budget_exhaustion_exit_code() {
    let r = cshor(&["synth", "--a", "4", "--N", "33", "--compile", "affine", "--max-cost", "5", "--no-search"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("budget exhausted"));
}

#[test]
fn simulate_theoretical_row() {
    let v = json(&["simulate", "--p", "3", "--epsilon", "1", "--shots", "0"]);
    let row: Vec<f64> = v["result"]["theoretical"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let paper = [0.344, 0.015, 0.063, 0.235, 0.031, 0.235, 0.063, 0.015];
    for (a, b) in row.iter().zip(paper) {
        assert!((a - b).abs() <= 0.001 + 1e-12);
    }
}

#[test]
fn simulate_rho_entry() {
    let v = json(&["simulate", "--p", "3", "--rho"]);
    let e = &v["result"]["rho"]["entries"][0][0];
    assert!((e[0].as_f64().unwrap() - 0.344).abs() <= 0.0005);
    let r = cshor(&["simulate", "--p", "3", "--rho", "--diff-paper"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("known erratum: rho3(0,5)"));
}

#[test]
fn simulate_estimates_noise() {
    let v = json(&["simulate", "--p", "4", "--epsilon", "0.5", "--shots", "100000", "--seed", "7"]);
    let eps = v["result"]["epsilon_estimate"]["epsilon"].as_f64().unwrap();
    assert!((eps - 0.5).abs() < 0.05);
}

#[test]
fn simulate_circuit_source() {
    let v = json(&["simulate", "--id", "f4_21_partial"]);
    assert_eq!(v["result"]["m"], 3);
    assert_eq!(v["result"]["k"], 2);
    assert!((v["result"]["theoretical"][0].as_f64().unwrap() - 0.34375).abs() < 1e-12);
}

#[test]
fn simulate_rejects_bad_registers() {
    assert_eq!(cshor(&["simulate", "--p", "3", "--m", "15", "--k", "10"]).code, 2);
    assert_eq!(cshor(&["simulate", "--p", "3", "--epsilon", "2"]).code, 2);
}

#[test]
fn factor_examples() {
    let v = json(&["factor", "--N", "15", "--a", "2", "--shots", "200", "--seed", "0"]);
    assert_eq!(v["result"]["factors"], serde_json::json!([3, 5]));
    let v = json(&["factor", "--N", "21", "--a", "4", "--shots", "500", "--seed", "0"]);
    assert_eq!(v["result"]["factors"], serde_json::json!([3, 7]));
    let v = json(&["factor", "--N", "33", "--a", "4", "--shots", "500", "--seed", "0"]);
    assert_eq!(v["result"]["factors"], Value::Null);
    assert_eq!(v["result"]["attempts"][0]["status"], "MinusOneCongruence");
}

#[test]
fn factor_rejects_prime_powers_and_even() {
    let r = cshor(&["factor", "--N", "27"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("prime power"));
    assert_eq!(cshor(&["factor", "--N", "14"]).code, 2);
    assert_eq!(cshor(&["factor", "--N", "13"]).code, 2);
}

#[test]
fn json_carries_manifest() {
    let v = json(&["factor", "--N", "15", "--a", "2", "--shots", "50", "--seed", "3"]);
    let m = &v["manifest"];
    assert_eq!(m["command"], "factor");
    assert_eq!(m["seed"], 3);
    assert!(m["checksums"]["factor.json"].as_str().unwrap().len() == 64);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["simulate", "--p", "5", "--epsilon", "0.7", "--shots", "2000", "--seed", "11", "--format", "json"];
    assert_eq!(cshor(&args).stdout, cshor(&args).stdout);
}

#[test]
fn replay_reproduces_and_detects_tampering() {
    let dir = scratch("replay");
    let path = dir.join("m.json");
    let r = cshor(&["simulate", "--p", "6", "--shots", "500", "--seed", "2", "--manifest", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let r = cshor(&["replay", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("reproduced"));

    let mut m: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    m["checksums"]["simulate.csv"] = Value::String("0".repeat(64));
    std::fs::write(&path, m.to_string()).unwrap();
    assert_eq!(cshor(&["replay", path.to_str().unwrap()]).code, 1);
}

#[test]
fn out_directory_gets_artifacts() {
    let dir = scratch("out");
    let r = cshor(&["tables", "probabilities", "--out", dir.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    for name in ["probabilities.csv", "probabilities.json", "manifest.json"] {
        assert!(dir.join(name).exists(), "{name}");
    }
}
