use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn abcmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abcmc"))
        .args(args)
        .env_remove("ABCMC_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn identical_files_have_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "1.5\n2\n-3\n4.25\n");
    for m in ["wasserstein1", "wass", "cvm", "mmd", "energy"] {
        let o = abcmc(&["distance", m, &a, &a]);
        assert!(o.status.success(), "{m}: {}", String::from_utf8_lossy(&o.stderr));
        let v: f64 = stdout(&o).trim().parse().unwrap();
        match m {
            // equal samples sit at the statistic's minimum, not at zero
            "cvm" => assert!(v < 0.1),
            // the unbiased estimator drops the diagonal, so identical samples score below zero
            "mmd" | "energy" => assert!(v < 0.0, "{m}: {v}"),
            _ => assert_eq!(v, 0.0, "{m}"),
        }
    }
}

#[test]
fn distance_reads_comma_and_space_separated_values() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", "# header\n1, 2 3\n");
    let b = write(dir.path(), "b.txt", "10 7 4\n");
    let o = abcmc(&["distance", "wasserstein1", &a, &b]);
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn expo_oracle_prints_three_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "y.csv", "0.5\n1.2\n3.3\n0.7\n2.2\n");
    let o = abcmc(&["oracle", "expo_family", &d]);
    assert!(o.status.success());
    let probs: Vec<f64> = stdout(&o).lines().map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(probs.len(), 3);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn normal_oracle_at_the_null_mean() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "y.csv", "2\n4\n");
    let o = abcmc(&["oracle", "normal_known", &d, "--mu-tilde", "3", "--c", "100"]);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    // B01 = sqrt(201) when the sample mean equals the null mean
    let b = 201f64.sqrt();
    let p0: f64 = lines[0].split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((p0 - b / (1.0 + b)).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(abcmc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(abcmc(&["distance", "cvm", "a", "b", "--bogus"]).status.code(), Some(2));
    assert_eq!(abcmc(&["distance", "hellinger", "a", "b"]).status.code(), Some(2));
    assert_eq!(abcmc(&[]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_nonzero_with_a_diagnostic() {
    let o = abcmc(&["distance", "cvm", "/nonexistent/a", "/nonexistent/b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/a"));
    let o = abcmc(&["simulate", "stable", "3.0", "1.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"schema_version": 1, "study": "gandk", "n_drawz": 10}"#);
    let o = abcmc(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_drawz"));
}

#[test]
fn simulate_is_seeded() {
    let a = abcmc(&["simulate", "gandk", "0", "1", "1", "0.5", "-n", "20", "--seed", "4"]);
    let b = abcmc(&["simulate", "gandk", "0", "1", "1", "0.5", "-n", "20", "--seed", "4"]);
    let c = abcmc(&["simulate", "gandk", "0", "1", "1", "0.5", "-n", "20", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a).lines().count(), 20);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let o = abcmc(&["simulate", "normal", "-1.5", "2", "-n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn toad_simulation_round_trips_through_toad_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toads.csv");
    let o = abcmc(&[
        "simulate", "toad-distance", "1.65", "32", "0.43", "758", "-n", "12", "--toads", "5", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = abcmc(&["toad-load", path.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["n_days"], 12);
    assert_eq!(report["n_toads"], 5);
    assert_eq!(report["n_missing"], 0);
}

#[test]
fn run_writes_identical_files_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "study.json",
        r#"{"schema_version": 1, "study": "expo_family", "n": 50, "n_datasets": 2, "n_draws": 2000, "quantiles": [0.05], "svg": true}"#,
    );
    let mut summaries = Vec::new();
    for w in ["1", "8"] {
        let out = dir.path().join(format!("out{w}"));
        let o = abcmc(&["run", &cfg, "--seed", "3", "--workers", w, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).lines().count(), 4);
        summaries.push((fs::read(out.join("summary.csv")).unwrap(), fs::read(out.join("estimates.csv")).unwrap()));
    }
    assert_eq!(summaries[0], summaries[1]);
    let text = String::from_utf8(summaries[0].0.clone()).unwrap();
    assert!(text.starts_with("study,method,quantile,size,true_model"));
    // 4 methods x 1 quantile x 3 truths
    assert_eq!(text.lines().count(), 13);
}
