//! End-to-end runs of the `enlarge` binary.

use std::path::Path;
use std::process::Command;

fn enlarge(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_enlarge"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn classify_refuses_the_jeulin_yor_example() {
    let (code, out) = enlarge(&["classify", "--family", "jy", "--alpha", "0.75", "--T", "1", "--no-timestamp"]);
    assert_eq!(code, 3);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["verdict"]["verdict"], "NOT_SEMIMARTINGALE");
    assert_eq!(v["status"], "REFUSED");
}

#[test]
fn classify_undecided_near_the_boundary() {
    let (code, _) = enlarge(&["classify", "--family", "jy", "--alpha", "1.0001", "--max-rungs", "4", "--no-timestamp"]);
    assert_eq!(code, 4);
}

#[test]
fn finite_demo_on_the_bundled_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _) = enlarge(&["finite-demo", "--instance", "examples/four_outcome.cfg", "--out", out, "--no-timestamp"]);
    assert_eq!(code, 0);
    let v = json(dir.path(), "finite-demo.json");
    let inst = &v["report"]["instance"];
    assert_eq!(inst["passed"], true);
    assert_eq!(inst["girsanov"]["compensator"][1], serde_json::json!(["1/1", "0/1", "0/1", "-1/1"]));
    assert_eq!(v["report"]["config"]["instance"], "examples/four_outcome.cfg");
}

#[test]
fn bridge_demo_documented_invocation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _) = enlarge(&[
        "bridge-demo", "--paths", "200000", "--steps", "1024", "--seed", "42", "--out", out, "--no-timestamp",
    ]);
    assert_eq!(code, 0);
    let v = json(dir.path(), "bridge-demo.json");
    assert_eq!(v["report"]["compensated"]["verdict"], "pass");
    assert_eq!(v["report"]["config"]["paths"], 200000);
    assert!(dir.path().join("bridge-demo_tests.csv").exists());
}

#[test]
fn reports_are_reproducible_and_thread_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &Path, threads: &str| {
        enlarge(&[
            "levy-demo", "--paths", "3000", "--steps", "128", "--seed", "9", "--threads", threads, "--out",
            dir.to_str().unwrap(), "--no-timestamp",
        ])
        .0
    };
    assert_eq!(run(a.path(), "1"), run(b.path(), "3"));
    for f in ["levy-demo.json", "levy-demo_tests.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn timestamp_is_present_unless_disabled() {
    let (_, out) = enlarge(&["classify", "--integrand", "indicator:T=1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["generated_at"].is_u64());
}

#[test]
fn config_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "paths = 100\nstepz = 4\n").unwrap();
    assert_eq!(enlarge(&["bridge-demo", "--config", cfg.to_str().unwrap()]).0, 64);
    assert_eq!(enlarge(&["drift-sim", "--phi", "wiggle:T=1"]).0, 64);
    assert_eq!(enlarge(&["finite-demo", "--instance", "no/such/file.cfg"]).0, 64);
    assert_eq!(enlarge(&["bridge-demo", "--paths", "1"]).0, 64);
}

#[test]
fn raw_path_fails_the_martingale_battery() {
    let (code, out) = enlarge(&["mg-test", "--process", "raw", "--paths", "20000", "--no-timestamp"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["regression"]["verdict"], "fail");
}

#[test]
fn drift_sim_refuses_non_semimartingales() {
    let (code, out) = enlarge(&["drift-sim", "--integrand", "jy:alpha=0.75,T=1", "--no-timestamp"]);
    assert_eq!(code, 3);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["report"]["refusal"].as_str().unwrap().contains("NOT_SEMIMARTINGALE"));
}
