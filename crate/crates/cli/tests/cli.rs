use std::path::Path;
use std::process::{Command, Output};

use betascale_core::special::reg_inc_beta;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_betascale"));
    c.env("SOURCE_DATE_EPOCH", "0").env_remove("BETASCALE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Data rows of a CSV output, manifest line and header skipped.
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(2).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn point_mass_forward_is_a_beta_law() {
    let dir = tempfile::tempdir().unwrap();
    let pm = spec(dir.path(), "pm.json", r#"{"family":"pointmass","c":1.0}"#);
    let text = ok(&["scale", "forward", "--dist", &pm, "--alpha", "2", "--beta", "2", "--what", "cdf", "--x-grid", "0.1:0.9:9"]);
    assert!(text.starts_with("# {"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 9);
    for r in rows {
        assert!((r[1] - reg_inc_beta(2.0, 2.0, r[0]).unwrap()).abs() <= 1e-9, "{r:?}");
    }
}

#[test]
fn pareto_tail_ratio_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = spec(dir.path(), "p.json", r#"{"family":"pareto","gamma":2.0,"xmin":1.0}"#);
    let v = json(&ok(&["tail", "ratio", "--dist", &p, "--alpha", "1", "--beta", "1", "--x", "2,4,8"]));
    assert_eq!(v["mda"], "frechet");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!((r["ratio"].as_f64().unwrap() - 1.0).abs() <= 1e-6, "{r}");
    }
}

#[test]
fn estimate_recovers_correlation_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let ray = spec(dir.path(), "ray.json", r#"{"family":"rayleigh","sigma":1.0}"#);
    let data = dir.path().join("d.csv");
    let data_s = data.to_str().unwrap();
    ok(&["ellip", "simulate", "--rho", "0.5", "--radial", &ray, "--n", "20000", "--seed", "1", "--out", data_s]);
    let est = dir.path().join("est.json");
    ok(&["estimate", "--input", data_s, "--x", "2", "--source", "r2", "--out", est.to_str().unwrap()]);
    let v = json(&std::fs::read_to_string(&est).unwrap());
    assert!((v["rho_hat"].as_f64().unwrap() - 0.5).abs() <= 0.03, "{}", v["rho_hat"]);
    assert_eq!(v["manifest"]["inputs"][0]["path"], data_s);

    let out = ok(&["--check", est.to_str().unwrap()]);
    assert!(out.starts_with("ok:"));

    // any edit to the input is caught
    let mut bytes = std::fs::read(&data).unwrap();
    bytes.push(b'\n');
    std::fs::write(&data, bytes).unwrap();
    let o = run(&["--check", est.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_detects_edited_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    ok(&["frac", "weyl", "--beta", "0.5", "--weight", "-2", "--x", "1,2", "--out", out.to_str().unwrap()]);
    assert!(ok(&["--check", out.to_str().unwrap()]).starts_with("ok:"));
    let text = std::fs::read_to_string(&out).unwrap().replace("\n1,", "\n1.0,");
    std::fs::write(&out, text).unwrap();
    let o = run(&["--check", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let e = spec(dir.path(), "e.json", r#"{"family":"exponential","rate":1.0}"#);
    assert_eq!(run(&["dist", "eval", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
    assert_eq!(run(&["dist", "eval", "--dist", "missing.json", "--x", "1"]).status.code(), Some(1));
    assert_eq!(run(&["scale", "forward", "--dist", &e, "--alpha", "-1", "--beta", "1", "--x", "1"]).status.code(), Some(1));
    let bad = spec(dir.path(), "bad.json", r#"{"family":"exponential","rate":1.0,"extra":2}"#);
    assert_eq!(run(&["dist", "eval", "--dist", &bad, "--x", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn tabulated_spec_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("specs");
    std::fs::create_dir(&sub).unwrap();
    std::fs::write(sub.join("t.csv"), "# made by hand\nx,cdf\n0.5,0.1\n1,0.4\n2,0.8\n3,0.95\n").unwrap();
    let t = spec(
        &sub,
        "t.json",
        r#"{"family":"tabulated","path":"t.csv","interpolation":"linear","below":{"linear_to":0.0},"above":"exponential"}"#,
    );
    let text = ok(&["dist", "eval", "--dist", &t, "--what", "cdf", "--x", "1.5"]);
    assert!((csv_rows(&text)[0][1] - 0.6).abs() <= 1e-12);
    let v: Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(v["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = spec(dir.path(), "g.json", r#"{"family":"gamma","shape":2.0,"rate":1.0}"#);
    let args = ["scale", "forward", "--dist", g.as_str(), "--alpha", "1.5", "--beta", "0.7", "--x-grid", "0.1:6:40"];
    let one = bin().args(args).env("BETASCALE_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("BETASCALE_THREADS", "4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let sample = ["dist", "sample", "--dist", g.as_str(), "--n", "50000", "--seed", "11"];
    let one = bin().args(sample).env("BETASCALE_THREADS", "1").output().unwrap();
    let four = bin().args(sample).env("BETASCALE_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, four.stdout);
    let bad = bin().args(sample).env("BETASCALE_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn out_path_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let e = spec(dir.path(), "e.json", r#"{"family":"exponential","rate":2.0}"#);
    let out = dir.path().join("eval.csv");
    let stdout = ok(&["dist", "eval", "--dist", &e, "--what", "sf", "--x", "0.5", "--out", out.to_str().unwrap()]);
    assert!(stdout.is_empty());
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert!((rows[0][1] - (-1.0f64).exp()).abs() <= 1e-15);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "{names:?}");
}
