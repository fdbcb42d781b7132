//! End-to-end tests of the `discrim` binary: exit codes, determinism of the
//! figure harness, and agreement between the CLI strategies and the analytic
//! oracles exposed by `bounds`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_discrim"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_code(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const PURE_PAIR: &str = r#"{
    "prior_q": 0.4,
    "subsystems": [
        {"type": "pure_qubit", "theta_plus": 0.5, "theta_minus": -0.7},
        {"type": "pure_qubit", "theta_plus": 1.9, "theta_minus": 0.3}
    ]
}"#;

const DEP_PAIR: &str = r#"{
    "prior_q": 0.5,
    "subsystems": [
        {"type": "depolarized_qubit", "theta_plus": 0.6, "theta_minus": 2.0, "gamma": 0.3},
        {"type": "depolarized_qubit", "theta_plus": -0.4, "theta_minus": 1.1, "gamma": 0.3}
    ]
}"#;

#[test]
fn malformed_problem_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    let (code, stderr) = run_code(&["discriminate", bad.to_str().unwrap()]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.starts_with("error:"), "stderr: {stderr}");

    // Structurally valid JSON with an invalid prior is also a usage error.
    let bad_prior = write(
        dir.path(),
        "bad_prior.json",
        r#"{"prior_q": 1.5, "subsystems": [{"type": "pure_qubit", "theta_plus": 0, "theta_minus": 1}]}"#,
    );
    let (code, _) = run_code(&["discriminate", bad_prior.to_str().unwrap()]);
    assert_eq!(code, 2);

    let missing = dir.path().join("does_not_exist.json");
    let (code, _) = run_code(&["discriminate", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn unknown_strategy_and_figure_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", PURE_PAIR);
    let (code, _) = run_code(&[
        "discriminate",
        problem.to_str().unwrap(),
        "--strategy",
        "psychic",
    ]);
    assert_eq!(code, 2);
    let (code, _) = run_code(&["figure", "fig99"]);
    assert_eq!(code, 2);
}

#[test]
fn figure_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        run_ok(&[
            "figure",
            "fig1",
            "--seed",
            "7",
            "--n-trial",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let ta = std::fs::read(&a).unwrap();
    let tb = std::fs::read(&b).unwrap();
    assert_eq!(ta, tb, "same seed must give byte-identical CSV");
    let text = String::from_utf8(ta).unwrap();
    assert!(text.contains("figure_id,series,x,mean,stderr,n_trial,seed"));
    assert!(text.contains("fig1_lg_copies"));
    // A different seed changes the sampled data.
    let c = dir.path().join("c.csv");
    run_ok(&[
        "figure", "fig1", "--seed", "8", "--n-trial", "5", "--out", c.to_str().unwrap(),
    ]);
    assert_ne!(tb, std::fs::read(&c).unwrap());
}

#[test]
fn discriminate_lg_matches_pure_state_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", PURE_PAIR);
    let out = run_ok(&["discriminate", problem.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let lg = v["success_probability"].as_f64().unwrap();

    let out = run_ok(&["bounds", problem.to_str().unwrap(), "--json"]);
    let b: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let joint = b["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["kind"] == "joint_helstrom")
        .and_then(|r| r["value"].as_f64())
        .unwrap();
    // For pure product states the greedy strategy attains the joint optimum.
    assert!((lg - joint).abs() <= 1e-9, "lg {lg} vs joint {joint}");

    // MLG never does worse than LG.
    let out = run_ok(&[
        "discriminate",
        problem.to_str().unwrap(),
        "--strategy",
        "mlg",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["success_probability"].as_f64().unwrap() >= lg - 1e-12);
}

#[test]
fn policy_build_eval_round_trip_and_stale_policy() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", DEP_PAIR);
    let policy = dir.path().join("policy.json");
    run_ok(&[
        "policy",
        "build",
        problem.to_str().unwrap(),
        "--out",
        policy.to_str().unwrap(),
        "--mode",
        "moody-best",
        "--q-p",
        "101",
        "--q-phi",
        "8",
    ]);
    let out = run_ok(&[
        "policy",
        "eval",
        policy.to_str().unwrap(),
        problem.to_str().unwrap(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.trim().parse().unwrap();
    assert!((0.5..=1.0).contains(&value), "success {value}");

    // The stored policy is rejected for any other problem.
    let other = write(
        dir.path(),
        "other.json",
        &DEP_PAIR.replace("0.6", "0.61"),
    );
    let (code, stderr) = run_code(&[
        "policy",
        "eval",
        policy.to_str().unwrap(),
        other.to_str().unwrap(),
    ]);
    assert_eq!(code, 4, "stderr: {stderr}");

    // Corrupted policy files are format errors, not crashes.
    std::fs::write(&policy, "{broken").unwrap();
    let (code, _) = run_code(&[
        "policy",
        "eval",
        policy.to_str().unwrap(),
        problem.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn policy_inspect_lists_grid() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", DEP_PAIR);
    let policy = dir.path().join("policy.json");
    run_ok(&[
        "policy",
        "build",
        problem.to_str().unwrap(),
        "--out",
        policy.to_str().unwrap(),
        "--mode",
        "order-mlg",
        "--q-p",
        "21",
    ]);
    let out = run_ok(&[
        "policy",
        "inspect",
        policy.to_str().unwrap(),
        problem.to_str().unwrap(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,subsystem");
    assert_eq!(lines.len(), 1 + 21, "one row per grid point");
    for line in &lines[1..] {
        let (_, k) = line.split_once(',').unwrap();
        assert!(matches!(k, "1" | "2"));
    }
}

#[test]
fn bounds_reports_plateau_for_shared_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", DEP_PAIR);
    let out = run_ok(&["bounds", problem.to_str().unwrap(), "--json"]);
    let b: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = b["bounds"].as_array().unwrap();
    let get = |kind: &str| {
        rows.iter()
            .find(|r| r["kind"] == kind)
            .unwrap_or_else(|| panic!("row {kind} present"))
    };
    let plateau = get("plateau")["value"].as_f64().unwrap();
    assert!((plateau - 0.9698).abs() <= 5e-5, "plateau {plateau}");
    let joint = get("joint_helstrom")["value"].as_f64().unwrap();
    let cor1 = get("corollary1")["value"].as_f64().unwrap();
    assert!(joint <= cor1 + 1e-10, "joint {joint} above corollary bound {cor1}");
}
