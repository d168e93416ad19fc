use std::process::{Command, Output};

fn adqec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adqec")).args(args).env_remove("ADQEC_CONFIG").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV report, split into cells.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let header: Vec<&str> = text.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows(text).into_iter().map(|r| r[i].clone()).collect()
}

fn real(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

#[test]
fn raw_entropy_values() {
    let o = adqec(&["entropy", "--p", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(column(&stdout(&o), "entropy"), ["0"]);

    let o = adqec(&["entropy", "--family", "indep-flips", "--p", "0.5"]);
    assert!(o.status.success());
    assert!((real(&column(&stdout(&o), "entropy")[0]) - 2.0).abs() < 1e-9);

    let o = adqec(&["entropy", "--p", "0.0630965416"]);
    assert!((real(&column(&stdout(&o), "entropy")[0]) - 1.0).abs() < 1e-8);
}

#[test]
fn adaptive_entropy_falls_below_raw() {
    let raw = adqec(&["entropy", "--p", "0.05"]);
    let l2 = adqec(&["entropy", "--p", "0.05", "--levels", "2", "--code", "steane"]);
    assert!(l2.status.success(), "{}", stderr(&l2));
    let out = stdout(&l2);
    assert_eq!(column(&out, "method"), ["exact"]);
    assert!(real(&column(&out, "entropy")[0]) < real(&column(&stdout(&raw), "entropy")[0]));
}

#[test]
fn steane_level_two_threshold() {
    let o = adqec(&["threshold", "--code", "steane", "--levels", "2", "--method", "exact"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let p = column(&out, "p_star");
    assert_eq!(p.len(), 3);
    assert!((real(&p[0]) / 0.0630965416 - 1.0).abs() < 1e-8);
    assert!((real(&p[2]) / 0.0626714580 - 1.0).abs() < 1e-6);
}

#[test]
fn unoptimized_five_qubit_threshold() {
    let o = adqec(&["threshold", "--unoptimized"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(column(&out, "level"), ["unoptimized"]);
    assert!((real(&column(&out, "p_star")[0]) / 0.0458758548 - 1.0).abs() < 1e-6);
}

#[test]
fn level_map_lists_every_syndrome() {
    let o = adqec(&["level-map", "--code", "steane", "--p", "0.01"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(rows(&out).len(), 64);
    let total: f64 = column(&out, "weight").iter().map(|w| real(w)).sum();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn codes_lists_builtins() {
    let o = adqec(&["codes"]);
    assert!(o.status.success());
    let names = column(&stdout(&o), "name");
    for n in ["five-qubit", "steane", "bitflip2", "repetition3"] {
        assert!(names.iter().any(|m| m == n), "{n} missing");
    }
}

#[test]
fn missing_crossing_is_a_failure() {
    let o = adqec(&["threshold", "--family", "phase-flip", "--target-entropy", "1.5", "--levels", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("entropy"), "{}", stderr(&o));

    let o = adqec(&["threshold", "--unoptimized", "--code", "bitflip2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no convergence transition"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["entropy", "--family", "bogus", "--p", "0.1"][..],
        &["entropy", "--p", "0.9"],
        &["entropy"],
        &["entropy", "--p", "0.1", "--code", "no-such-code"],
        &["entropy", "--p", "0.1", "--samples", "0"],
        &["frobnicate"],
    ] {
        let o = adqec(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn json_report_reloads_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = adqec(&[
        "entropy",
        "--code",
        "steane",
        "--p",
        "0.04",
        "--levels",
        "1",
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let first: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(first["schema_version"], 1);

    let o = Command::new(env!("CARGO_BIN_EXE_adqec"))
        .args(["entropy", "--format", "json"])
        .env("ADQEC_CONFIG", &report)
        .output()
        .unwrap();
    // The config names the output file, so the rerun overwrites it.
    assert!(o.status.success(), "{}", stderr(&o));
    let second: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(first["config"], second["config"]);
    assert_eq!(first["rows"], second["rows"]);
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["mc", "--code", "steane", "--p", "0.06", "--levels", "3", "--samples", "2000"];
    let a = adqec(&[&args[..], &["--seed", "7"]].concat());
    assert!(a.status.success(), "{}", stderr(&a));
    let b = adqec(&[&args[..], &["--seed", "7", "--threads", "1"]].concat());
    let c = adqec(&[&args[..], &["--seed", "8"]].concat());
    assert_eq!(rows(&stdout(&a)), rows(&stdout(&b)));
    assert_ne!(column(&stdout(&a), "mean_entropy"), column(&stdout(&c), "mean_entropy"));
}

#[test]
fn dry_run_computes_nothing() {
    let o = adqec(&["threshold", "--code", "steane", "--levels", "4", "--dry-run"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("dry run"));
    assert!(!out.contains("p_star"));

    let o = adqec(&["reproduce", "--mc", "--dry-run"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(rows(&stdout(&o)).len(), 22);
}
