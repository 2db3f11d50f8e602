use std::process::{Command, Output};

use serde_json::Value;

fn ptheta(args: &[&str]) -> Output {
    ptheta_env(args, &[])
}

fn ptheta_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ptheta"));
    cmd.args(args).env_remove("PTHETA_PRECISION").env_remove("RUST_LOG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn ptheta")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn c0_value() {
    let o = ptheta(&["c0", "--tol", "1e-10"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["c0"].as_f64().unwrap() - 0.2078750206).abs() < 1e-9);
    assert_eq!(v.as_object().unwrap().len(), 1);
}

#[test]
fn c0_extended_adds_low_word() {
    let o = ptheta_env(&["c0", "--tol", "1e-25"], &[("PTHETA_PRECISION", "extended")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["c0_lo"].as_f64().unwrap().abs() < 1e-16);
    assert!((v["c0"].as_f64().unwrap() - 0.20787502060821565).abs() < 1e-16);
}

#[test]
fn bad_complex_is_a_usage_error() {
    let o = ptheta(&["eval", "--q", "0.5", "--x", "bogus"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("a+bi"));
    assert_eq!(code(&ptheta(&["eval", "--q", "1.5", "--x", "1"])), 2);
    assert_eq!(code(&ptheta(&["frobnicate"])), 2);
    assert_eq!(code(&ptheta(&["--help"])), 0);
    assert_eq!(code(&ptheta_env(&["c0"], &[("PTHETA_PRECISION", "quad")])), 2);
}

#[test]
fn eval_complex_point() {
    let o = ptheta(&["eval", "--q", "0.3+0.1i", "--x", "-2.5+0.7i"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    // 40 terms of the defining series
    let (q, x) = (
        num_complex::Complex64::new(0.3, 0.1),
        num_complex::Complex64::new(-2.5, 0.7),
    );
    let direct: num_complex::Complex64 = (0..40u32).map(|j| q.powu(j * (j + 1) / 2) * x.powu(j)).sum();
    let got = num_complex::Complex64::new(v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap());
    assert!((got - direct).norm() < 1e-12 * direct.norm());
    assert_eq!(v["path"], "identity");
}

#[test]
fn eval_csv_and_extended_fallback() {
    let o = ptheta(&["--format", "csv", "eval", "--q", "0.5", "--x", "-3"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("function,q_re,q_im,x_re,x_im,re,im"));
    assert_eq!(lines.count(), 1);

    let o = ptheta_env(
        &["eval", "--q", "0.5", "--x", "-3"],
        &[("PTHETA_PRECISION", "extended")],
    );
    assert_eq!(json(&o)["precision"], "extended");
    let o = ptheta_env(
        &["eval", "--q", "0.5+0.1i", "--x", "-3"],
        &[("PTHETA_PRECISION", "extended")],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["precision"], "double");
    assert!(String::from_utf8_lossy(&o.stderr).contains("extended precision"));
}

#[test]
fn numerical_failure_exit_code() {
    let o = ptheta(&["eval", "--function", "dtheta", "--q", "0.9", "--x", "1e10"]);
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
}

#[test]
fn zeros_at_small_q() {
    let o = ptheta(&["zeros", "--q", "0.1", "--k-max", "6"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let zs = v.as_array().unwrap();
    assert_eq!(zs.len(), 6);
    assert!(zs.iter().all(|z| z["multiplicity"] == 1));
    let o = ptheta(&["zeros", "--q", "0.3092493386000775", "--x0", "-7.4"]);
    assert_eq!(json(&o)[0]["multiplicity"], 2);
}

#[test]
fn verify_bounds_reproducible() {
    let args = [
        "verify-bounds",
        "--suite",
        "lemma-L",
        "--trials",
        "1000",
        "--seed",
        "42",
    ];
    let a = ptheta(&args);
    assert_eq!(code(&a), 0);
    let v = json(&a);
    assert_eq!(v["total_failures"], 0);
    assert_eq!(v["suites"][0]["reports"], 5000);
    let b = ptheta_env(&args, &[("RUST_LOG", "info")]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!b.stderr.is_empty(), "logs go to stderr");
    assert_eq!(code(&ptheta(&["verify-bounds", "--suite", "nope"])), 2);
}

#[test]
fn certify_exit_codes() {
    let ok = ptheta(&["certify", "--q", "0.75", "--s", "80", "--regime", "n=4", "--newton"]);
    assert_eq!(code(&ok), 0);
    let v = json(&ok);
    assert_eq!(v["pass"], true);
    assert_eq!(v["winding"], 1);
    assert_eq!(v["zero_in_disk"], true);
    let short = ptheta(&["certify", "--q", "0.75", "--s", "79", "--regime", "n=4"]);
    assert_eq!(code(&short), 1);
    assert_eq!(json(&short)["in_X"], false);
    assert_eq!(
        code(&ptheta(&["certify", "--q", "0.75", "--s", "80", "--regime", "weird"])),
        2
    );
    assert_eq!(code(&ptheta(&["certify", "--q", "0.1", "--s", "80"])), 2);
}

#[test]
fn scan_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dz.jsonl");
    let p = path.to_str().unwrap();
    let o = ptheta(&[
        "scan-double",
        "--q-lo",
        "0.28",
        "--q-hi",
        "0.55",
        "--steps",
        "30",
        "--x-steps",
        "30",
        "--out",
        p,
    ]);
    assert_eq!(code(&o), 0);
    let recs = json(&o);
    assert_eq!(recs.as_array().unwrap().len(), 2);
    let a = ptheta(&["audit", p]);
    assert_eq!(code(&a), 0);
    assert_eq!(json(&a)["bound_violations"], 0);
    let csv = ptheta(&["--format", "csv", "audit", p]);
    assert!(String::from_utf8(csv.stdout)
        .unwrap()
        .starts_with("q,zeta_re,zeta_im,dist_to_minus_e_pi"));

    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str(r#"{"schema":"dz/1","q_re":0.9,"q_im":0.0,"zeta_re":-1e10,"zeta_im":0.0,"res_theta":0.0,"res_dtheta":0.0,"jac_cond":1.0,"bound_ok":true}"#);
    text.push('\n');
    std::fs::write(&path, text).unwrap();
    let a = ptheta(&["audit", p]);
    assert_eq!(code(&a), 1);
    assert_eq!(json(&a)["bound_violations"], 1);

    std::fs::write(&path, "{\n").unwrap();
    let a = ptheta(&["audit", p]);
    assert_eq!(code(&a), 2);
    assert!(String::from_utf8_lossy(&a.stderr).contains("line 1"));
}

#[test]
fn scan_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let body = serde_json::json!({
        "q_region": {"kind": "real_interval", "lo": 0.01, "hi": 0.108},
        "grid_steps": [10],
        "seed_strategy": {"kind": "real_line", "lo": -30.0, "hi": -2.0, "steps": 20},
        "tolerances": {"newton": 1e-10, "max_iter": 100, "winding_samples": 4096}
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    let o = ptheta(&["scan-double", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o).as_array().unwrap().is_empty());
}
