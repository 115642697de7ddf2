//! Integration tests for the command-line interface: flag validation, exit
//! codes, output-format equivalence, and the violation dump path.

use std::collections::BTreeMap;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qdimtest")
}

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn qdimtest");
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap_or(-1),
    }
}

#[test]
fn bound_requires_exactly_one_threshold_flag() {
    let r = run(&["bound", "--n", "10", "--p", "1"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let r = run(&[
        "bound", "--n", "10", "--t", "1", "--alpha", "0.1", "--p", "1",
    ]);
    assert_eq!(r.code, 2);
    let r = run(&["bound", "--n", "10", "--t", "1", "--p", "1.7"]);
    assert_eq!(r.code, 2, "p out of range must fail");
    let r = run(&[
        "bound", "--n", "10", "--t", "1", "--p", "0.9", "--family", "mub", "--d", "6",
    ]);
    assert_eq!(r.code, 2, "non-prime-power d must fail");
}

#[test]
fn bound_prints_exact_and_stirling_with_dominance() {
    let r = run(&[
        "bound", "--n", "90", "--t", "9", "--p", "0.99", "--format", "csv",
    ]);
    assert_eq!(r.code, 0);
    let mut by_variant = BTreeMap::new();
    for line in r.stdout.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        by_variant.insert(fields[0].to_string(), fields[5].parse::<f64>().unwrap());
    }
    let exact = by_variant["exact"];
    let stirling = by_variant["stirling"];
    assert!(exact >= stirling, "{exact} < {stirling}");
}

#[test]
fn bound_flags_vacuous_threshold() {
    let r = run(&["bound", "--n", "4", "--t", "4", "--p", "0.5"]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("vacuous"), "stderr: {}", r.stderr);
    assert!(r.stdout.contains("vacuous threshold"));
}

#[test]
fn bound_bb84_carries_asymptotic_caveat() {
    let r = run(&[
        "bound", "--n", "10", "--t", "2", "--p", "1", "--family", "bb84",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("asymptotic"), "stdout: {}", r.stdout);
    let r = run(&[
        "bound", "--n", "10", "--t", "2", "--p", "1", "--family", "bb84", "--format", "jsonl",
    ]);
    assert!(r.stdout.contains("\"asymptotic\":true"));
}

#[test]
fn sweep_csv_and_jsonl_encode_identical_values() {
    let csv = run(&[
        "sweep",
        "--n-min",
        "5",
        "--n-max",
        "12",
        "--totals",
        "0.001,0.005",
    ]);
    let jsonl = run(&[
        "sweep",
        "--n-min",
        "5",
        "--n-max",
        "12",
        "--totals",
        "0.001,0.005",
        "--format",
        "jsonl",
    ]);
    assert_eq!(csv.code, 0);
    assert_eq!(jsonl.code, 0);
    let header: Vec<&str> = csv.stdout.lines().next().unwrap().split(',').collect();
    let csv_rows: Vec<&str> = csv.stdout.lines().skip(1).collect();
    let json_rows: Vec<&str> = jsonl.stdout.lines().collect();
    assert_eq!(csv_rows.len(), json_rows.len());
    for (c, j) in csv_rows.iter().zip(&json_rows) {
        let values: Vec<&str> = c.split(',').collect();
        let parsed: serde_json::Value = serde_json::from_str(j).unwrap();
        for (key, val) in header.iter().zip(&values) {
            let from_json = &parsed[key];
            let rendered = if from_json.is_string() {
                from_json.as_str().unwrap().to_string()
            } else {
                from_json.to_string()
            };
            assert_eq!(
                &rendered, val,
                "column {key} differs: csv {val} vs json {rendered}"
            );
        }
    }
}

#[test]
fn sweep_writes_identical_file_across_reruns() {
    let dir = std::env::temp_dir().join(format!("qdimtest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for (path, threads) in [(&a, "2"), (&b, "1")] {
        let r = run_env(
            &[
                "sweep",
                "--n-min",
                "5",
                "--n-max",
                "40",
                "--out",
                path.to_str().unwrap(),
            ],
            &[("RAYON_NUM_THREADS", threads)],
        );
        assert_eq!(r.code, 0);
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "sweep files differ across parallelism levels"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_rejects_bad_ranges() {
    let r = run(&["sweep", "--n-min", "10", "--n-max", "5"]);
    assert_eq!(r.code, 2);
}

#[test]
fn sweep_zero_noise_certifies_n() {
    let r = run(&["sweep", "--n-min", "5", "--n-max", "9", "--totals", "0"]);
    assert_eq!(r.code, 0);
    for line in r.stdout.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], fields[7], "certified must equal n: {line}");
    }
}

#[test]
fn simulate_zero_noise_certifies_near_n() {
    let r = run(&[
        "simulate", "--n", "12", "--t", "0", "--trials", "10000", "--seed", "4", "--format",
        "jsonl",
    ]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(r.stdout.trim()).unwrap();
    assert_eq!(v["p_hat"], 1.0);
    // p_lower = delta^(1/trials); the bound at p_lower stays close to n.
    let certified = v["certified_qubits"].as_f64().unwrap();
    assert!(certified > 11.8, "certified = {certified}");
}

#[test]
fn simulate_store_k_certifies_at_most_k() {
    let r = run(&[
        "simulate",
        "--n",
        "8",
        "--t",
        "1",
        "--strategy",
        "store-k",
        "--k",
        "3",
        "--trials",
        "200000",
        "--seed",
        "10",
        "--format",
        "jsonl",
    ]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(r.stdout.trim()).unwrap();
    assert!(v["certified_qubits"].as_f64().unwrap() <= 3.0 + 1e-9);
}

#[test]
fn simulate_seed_env_var_and_repeatability() {
    let args = [
        "simulate", "--n", "20", "--t", "1", "--total", "0.01", "--trials", "5000", "--format",
        "csv",
    ];
    let a = run_env(&args, &[("QDIMTEST_SEED", "77")]);
    let b = run(&[
        "simulate", "--n", "20", "--t", "1", "--total", "0.01", "--trials", "5000", "--seed", "77",
        "--format", "csv",
    ]);
    assert_eq!(a.stdout, b.stdout, "env seed must act as --seed");
}

#[test]
fn simulate_validates_strategy_flags() {
    let r = run(&["simulate", "--n", "8", "--t", "1", "--strategy", "store-k"]);
    assert_eq!(r.code, 2, "store-k without --k");
    let r = run(&[
        "simulate",
        "--n",
        "8",
        "--t",
        "1",
        "--strategy",
        "fixed",
        "--answer",
        "01x",
    ]);
    assert_eq!(r.code, 2, "malformed bit string");
    let r = run(&[
        "simulate",
        "--n",
        "8",
        "--t",
        "1",
        "--strategy",
        "store-k",
        "--k",
        "9",
    ]);
    assert_eq!(r.code, 2, "k > n");
}

#[test]
fn simulate_writes_trial_log() {
    let dir = std::env::temp_dir().join(format!("qdimtest-log-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let log = dir.join("trials.jsonl");
    let r = run(&[
        "simulate",
        "--n",
        "6",
        "--t",
        "1",
        "--trials",
        "50",
        "--seed",
        "2",
        "--trial-log",
        log.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    let content = std::fs::read_to_string(&log).unwrap();
    assert_eq!(content.lines().count(), 50);
    let first: serde_json::Value = serde_json::from_str(content.lines().next().unwrap()).unwrap();
    assert_eq!(first["s"].as_str().unwrap().len(), 6);
    assert!(first["theta"] == "Z" || first["theta"] == "X");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_suites_pass_and_are_deterministic() {
    // n filter restricts instance size; out-of-range n is a usage error.
    let filtered = run(&[
        "verify",
        "--suite",
        "uncertainty",
        "--n",
        "1",
        "--count",
        "20",
    ]);
    assert_eq!(filtered.code, 0, "{}", filtered.stderr);
    let bad = run(&[
        "verify",
        "--suite",
        "uncertainty",
        "--n",
        "5",
        "--count",
        "20",
    ]);
    assert_eq!(bad.code, 2);
    let ok = run(&[
        "verify",
        "--suite",
        "uncertainty",
        "--count",
        "30",
        "--seed",
        "7",
    ]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(ok.stdout.contains("[ok]"));
    let again = run(&[
        "verify",
        "--suite",
        "uncertainty",
        "--count",
        "30",
        "--seed",
        "7",
    ]);
    assert_eq!(ok.stdout, again.stdout);
}

#[test]
fn verify_self_test_dumps_violation_and_exits_one() {
    let dir = std::env::temp_dir().join(format!("qdimtest-dump-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let r = run(&[
        "verify",
        "--suite",
        "self-test",
        "--dump-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("FAIL"));
    let dump = dir.join("qdimtest-violations-self-test.jsonl");
    let content = std::fs::read_to_string(&dump).unwrap();
    let v: serde_json::Value = serde_json::from_str(content.trim()).unwrap();
    assert!(v["lhs"].as_f64().unwrap() < v["rhs"].as_f64().unwrap());
    assert!(v["joint_matrix"].is_array());
    std::fs::remove_dir_all(&dir).ok();
}
