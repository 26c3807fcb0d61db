use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn carleman(args: &[&str]) -> Output {
    carleman_env(args, &[])
}

fn carleman_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_carleman"));
    cmd.args(args).env_remove("CARLEMAN_PRECISION");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Every number in a report is written as a string.
fn no_bare_numbers(v: &Value) -> bool {
    match v {
        Value::Number(_) => false,
        Value::Array(a) => a.iter().all(no_bare_numbers),
        Value::Object(o) => o.values().all(no_bare_numbers),
        _ => true,
    }
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().expect("number")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn seq_check_gevrey_one() {
    let out = carleman(&["seq-check", "--gevrey", "1", "--depth", "20"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert!(no_bare_numbers(&r));
    assert_eq!(r["backend"], "exact");
    assert_eq!(num(&r["alg"]["C"]), 1.0);
    assert_eq!(num(&r["fdb"]["A"]), 1.0);
    assert_eq!(num(&r["fdb"]["h"]), 1.0);
    assert_eq!(r["log_convex"]["flag"], true);
    let eq = r["equivalence"].as_array().unwrap();
    assert_eq!(eq[0]["against"], "gevrey:1");
    assert_eq!(num(&eq[0]["b_low"]), 1.0);
    assert_eq!(num(&eq[0]["b_high"]), 1.0);
}

#[test]
fn seq_check_reports_the_first_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "m.json", r#"["1", "1", "3", "4", "20"]"#);
    let out = carleman(&["seq-check", "--custom", &path, "--depth", "4"]);
    assert_eq!(code(&out), 1);
    let r = json(&out);
    assert_eq!(r["log_convex"]["flag"], false);
    assert_eq!(r["log_convex"]["first_violation"], "2");
}

#[test]
fn seq_check_budget_is_named() {
    let out = carleman(&["seq-check", "--gevrey", "1", "--depth", "41"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("budget of k <= 40"), "{}", stderr(&out));
    let out = carleman(&["seq-check", "--gevrey", "1", "--depth", "12", "--budget", "10"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("budget of k <= 10"));
}

#[test]
fn seq_check_csv_and_custom_csv_input() {
    let out = carleman(&["seq-check", "--gevrey", "1", "--depth", "4", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "index,value\n0,1\n1,1\n2,2\n3,6\n4,24\n");

    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "m.csv", &text);
    let out = carleman(&["seq-check", "--custom", &path, "--depth", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(num(&json(&out)["fdb"]["h"]), 1.0);
}

#[test]
fn malformed_inputs_exit_two() {
    for args in [
        vec!["seq-check", "--seq", "nonsense"],
        vec!["verify", "--fn", "etilde:x"],
        vec!["verify", "--fn", "krs:1"],
        vec!["basis-eval"],
        vec!["transform", "--gevrey", "1", "--alpha", "3"],
        vec!["seq-check", "--gevrey", "1", "--precision", "29"],
        vec!["seq-check", "--gevrey", "1", "--depth", "1"],
        vec!["no-such-command"],
    ] {
        let out = carleman(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn verify_krs_against_the_constant_four() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("w.csv");
    let out = carleman(&["verify", "--fn", "krs", "--alpha", "2", "--paper-bound", "4", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert!(no_bare_numbers(&r));
    assert_eq!(r["pass_flags"]["paper_bound"], true);
    assert_eq!(r["W"].as_array().unwrap().len(), 31);
    assert!(r["W"].as_array().unwrap().iter().all(|w| num(w) <= 4.0));
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("n,W,r,theta\n0,"));
    assert_eq!(table.lines().count(), 32);

    let out = carleman(&["verify", "--fn", "krs", "--paper-bound", "0.5", "--n-r", "20", "--n-theta", "5"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["pass_flags"]["paper_bound"], false);
}

#[test]
fn verify_etilde_reports_a_fit() {
    let out = carleman(&[
        "verify", "--fn", "etilde:1", "--seq", "power_gevrey:-1", "--nmax", "12", "--n-r", "20", "--n-theta", "7", "--r-max", "10",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["sequence"], "power_gevrey:-1");
    assert!(num(&r["fit"]["A"]) > 0.0 && num(&r["fit"]["h"]).is_finite());
    assert!(r["pass_flags"]["paper_bound"].is_null());
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["verify", "--fn", "recip1p", "--seq", "gevrey:1", "--nmax", "8", "--n-r", "15", "--n-theta", "5"];
    let a = carleman(&args);
    let b = carleman(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let a = carleman(&["experiment", "product-necessity", "--gevrey", "1", "--alpha", "2", "--depth", "12"]);
    let b = carleman(&["experiment", "product-necessity", "--gevrey", "1", "--alpha", "2", "--depth", "12"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn saved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let args = [
        "verify", "--fn", "expneg", "--seq", "gevrey:1", "--nmax", "6", "--n-r", "9", "--n-theta", "3", "--precision", "40",
        "--save-config", cfg.to_str().unwrap(),
    ];
    let first = carleman(&args);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_eq!(saved["precision"], 40);
    assert_eq!(saved["functions"][0], "expneg");

    let again = carleman(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&again), 0, "{}", stderr(&again));
    assert_eq!(first.stdout, again.stdout);

    // saving the loaded config again changes nothing
    let cfg2 = dir.path().join("run2.json");
    carleman(&["verify", "--config", cfg.to_str().unwrap(), "--save-config", cfg2.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&cfg).unwrap(), std::fs::read_to_string(&cfg2).unwrap());
}

#[test]
fn bad_config_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "a.json", r#"{"depht": 3}"#);
    let low = write(dir.path(), "b.json", r#"{"precision": 20}"#);
    for path in [unknown.as_str(), low.as_str(), "/nonexistent/run.json"] {
        let out = carleman(&["seq-check", "--config", path]);
        assert_eq!(code(&out), 2, "{path}: {}", stderr(&out));
    }
}

#[test]
fn precision_from_environment() {
    let args = ["basis-eval", "--fn", "recip1p", "--r", "0.5"];
    let out = carleman_env(&args, &[("CARLEMAN_PRECISION", "60")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["precision_digits"], "60");
    // 1 / (1 + 1/2) = 2/3 to 60 digits
    assert_eq!(r["value"]["re"], format!("6.{}7e-1", "6".repeat(58)));

    let out = carleman_env(&["basis-eval", "--fn", "recip1p", "--precision", "35"], &[("CARLEMAN_PRECISION", "60")]);
    assert_eq!(json(&out)["precision_digits"], "35");

    for bad in ["12", "many"] {
        let out = carleman_env(&args, &[("CARLEMAN_PRECISION", bad)]);
        assert_eq!(code(&out), 2, "{bad}");
    }
}

#[test]
fn basis_eval_coefficients() {
    let out = carleman(&["basis-eval", "--fn", "falpha:3:4", "--coeffs", "2", "--r", "0.1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let c = &json(&out)["coefficients"];
    assert_eq!(num(&c[0]["re"]), 0.5);
    assert!((num(&c[1]["re"]) + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn transform_of_krs_over_gevrey() {
    let out = carleman(&["transform", "--gevrey", "1", "--alpha", "2", "--order", "6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["base"], "krs");
    assert_eq!(r["certificate_source"], "paper");
    assert_eq!(r["r_values"].as_array().unwrap().len(), 6);
    assert_eq!(num(&r["expansion"]["A"]).round(), 8.0);
}

#[test]
fn expansions_survive_remeasurement() {
    let out = carleman(&["expand-product", "--f", "recip1p", "--g", "expneg", "--order", "8", "--check"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["check"]["within_certificate"], true);

    let out = carleman(&["expand-compose", "--outer", "expneg", "--inner", "zover1pz", "--order", "8", "--check"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(num(&r["fdb"]["C"]), 1.0);
    assert_eq!(r["check"]["within_certificate"], true);

    let out = carleman(&["expand-compose", "--outer", "expneg", "--inner", "recip1p", "--order", "6"]);
    assert_eq!(code(&out), 2);
    let out = carleman(&["expand-compose", "--outer", "expneg", "--inner", "recip1p", "--shift-inner", "--order", "6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn experiments() {
    let out = carleman(&["experiment", "product-necessity", "--gevrey", "1", "--alpha", "2", "--depth", "25"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["inequality_failures"], "0");
    assert_eq!(r["sign_ok"], true);

    let out = carleman(&["experiment", "compose-necessity", "--gevrey", "1", "--alpha", "2", "--depth", "12"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert!(num(&r["fdb_c_fit"]) >= 1.0 && num(&r["fdb_h_fit"]).is_finite());
    assert_eq!(r["fdb_consistent"], true);

    let out = carleman(&["experiment", "sector-image", "--alpha", "1", "--beta", "0.5", "--format", "table"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("found: true"));
    assert!(text.contains("deviation_table[0].max_deviation: "));
}

#[test]
fn csv_is_refused_where_there_is_no_table() {
    let out = carleman(&["basis-eval", "--fn", "krs", "--format", "csv"]);
    assert_eq!(code(&out), 2);
}
