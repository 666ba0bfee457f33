//! End-to-end runs of the `archmix` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn archmix(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_archmix"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("ARCHMIX_OUT")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn unknown_command_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).to_lowercase().contains("usage"), "{}", stderr(&o));
}

#[test]
fn malformed_spec_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"kind\": \"tvarch\",\n  \"a0\": 0.1,\n  \"coeffs\": [0.5,\n}\n").unwrap();
    let o = archmix(&["bound", "--spec", bad.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("line 5"), "{msg}");
}

#[test]
fn missing_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(&["estimate", "--spec", &fixture("arch1.json")], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn verify_on_arch1_fixture_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(&["verify", "--spec", &fixture("arch1.json"), "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = read(dir.path(), "verify.csv");
    assert!(csv.starts_with("# config_hash="));
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "suite,check,value,tolerance,pass");
    assert!(rows[1..].iter().all(|r| r.ends_with(",true")));
    for suite in ["volterra,", "density,", "minimize-eta,"] {
        assert!(rows.iter().any(|r| r.starts_with(suite)), "{suite}");
    }
}

#[test]
fn verify_selects_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(
        &["verify", "minimize-eta", "--spec", &fixture("arch1_inf.json"), "--seed", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = read(dir.path(), "verify.csv");
    assert!(data_lines(&csv)[1..].iter().all(|r| r.starts_with("minimize-eta,")));
    let o = archmix(&["verify", "nonsense", "--spec", &fixture("arch1.json"), "--seed", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_without_bounds_leaves_comparison_empty() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(
        &[
            "sweep", "--spec", &fixture("arch1.json"), "--seed", "4", "--k", "1..3", "--samples", "20000",
            "--no-bounds",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = read(dir.path(), "sweep.csv");
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "k,estimate,estimate_se,bound,dominated");
    for r in &rows[1..] {
        let f: Vec<&str> = r.split(',').collect();
        assert!(!f[1].is_empty());
        assert!(f[3].is_empty() && f[4].is_empty(), "{r}");
    }
    assert!(!dir.path().join("bound.csv").exists());
}

#[test]
fn bound_writes_curve_and_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(&["bound", "--spec", &fixture("arch1_inf.json"), "--k", "2..6"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = read(dir.path(), "bound.csv");
    let hash = csv.lines().next().unwrap().strip_prefix("# config_hash=").unwrap().to_string();
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "k,alpha_bound,beta_bound,twomix_bound,tight_alpha,rate_class");
    assert_eq!(rows.len(), 6);
    // k = 4: 6(1+√2)/4
    let f: Vec<&str> = rows[3].split(',').collect();
    let v: f64 = f[1].parse().unwrap();
    assert!((v - 6.0 * (1.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "bound_constants.json")).unwrap();
    assert_eq!(json["config_hash"].as_str(), Some(hash.as_str()));
    assert!(json["constants"]["k_nu"].as_f64().is_some());
}

#[test]
fn tight_and_literal_flags_change_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("arch1_inf.json");
    let packaged = archmix(&["bound", "--spec", &spec, "--k", "2..4"], &dir.path().join("a"));
    let tight = archmix(&["bound", "--spec", &spec, "--k", "2..4", "--tight"], &dir.path().join("b"));
    let literal = archmix(
        &["bound", "--spec", &spec, "--k", "2..4", "--literal-two-mix"],
        &dir.path().join("c"),
    );
    for o in [&packaged, &tight, &literal] {
        assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    }
    let first = |d: &str| read(&dir.path().join(d), "bound.csv").lines().next().unwrap().to_string();
    assert_ne!(first("a"), first("b"));
    assert_ne!(first("a"), first("c"));
    let both = archmix(&["bound", "--spec", &spec, "--tight", "--packaged"], &dir.path().join("d"));
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn report_summarises_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(
        &["sweep", "--spec", &fixture("arch1.json"), "--seed", "6", "--k", "1..5", "--samples", "40000"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = archmix(&["report"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = read(dir.path(), "report.txt");
    let sweep_hash = read(dir.path(), "sweep.csv").lines().next().unwrap()["# config_hash=".len()..].to_string();
    assert!(text.contains(&format!("source_config_hash: {sweep_hash}")));
    assert!(text.contains("dominated: 5 of 5"));
}

#[test]
fn saved_config_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a: PathBuf = dir.path().join("a");
    let b: PathBuf = dir.path().join("b");
    let o = archmix(
        &["estimate", "--spec", &fixture("tvarch2.json"), "--seed", "8", "--k", "1..3", "--samples", "30000"],
        &a,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = a.join("estimate.config.json");
    let o = archmix(&["estimate", "--config", cfg.to_str().unwrap()], &b);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read(&a, "estimate.csv"), read(&b, "estimate.csv"));
    let o = archmix(&["bound", "--config", cfg.to_str().unwrap()], &b);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn env_var_overrides_out() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_archmix"))
        .args(["bound", "--spec", &fixture("arch1.json"), "--k", "3", "--out"])
        .arg(dir.path().join("flag"))
        .env("ARCHMIX_OUT", &env_out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_out.join("bound.csv").exists());
    assert!(!dir.path().join("flag").exists());
}

#[test]
fn simulate_writes_requested_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = archmix(
        &["simulate", "--spec", &fixture("archinf_geometric.json"), "--seed", "3", "--samples", "800", "--replicates", "4"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = read(dir.path(), "paths.csv");
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "replicate,t,x");
    assert_eq!(rows.len(), 801);
}
