//! End-to-end tests of the `brody` binary and the config/summary plumbing.

use std::fs;
use std::path::Path;
use std::process::Command;

use brody_cli::{emit_summary, run_experiment, ExperimentConfig};

fn brody(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_brody"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

#[test]
fn unknown_config_fields_are_rejected() {
    assert!(ExperimentConfig::from_toml("kind = \"pde-selftest\"\nbogus = 1\n").is_err());
    assert!(
        ExperimentConfig::from_toml("kind = \"pde-selftest\"\n[pde]\nwrong = 2\n").is_err()
    );
    assert!(ExperimentConfig::from_toml("kind = \"not-a-kind\"\n").is_err());
    // Minimal valid configs parse with defaults.
    let cfg = ExperimentConfig::from_toml("kind = \"rho-search\"\n").unwrap();
    assert_eq!(cfg.seed, 0);
}

#[test]
fn invalid_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "kind = \"pde-selftest\"\nbogus = true\n").unwrap();
    let out = brody(&["run", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));
}

#[test]
fn run_and_summarize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("exp.toml"),
        "kind = \"pde-selftest\"\nseed = 7\n[pde]\nsamples = 5\ngrid = 32\n",
    )
    .unwrap();
    let out = brody(&["run", "exp.toml", "--out", "runs/pde"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stdout: {stdout}");
    assert!(stdout.contains("[pass]"));
    assert!(dir.path().join("runs/pde/manifest.json").exists());
    assert!(dir.path().join("runs/pde/pde.report.json").exists());

    // --seed overrides the config seed.
    let out2 = brody(
        &["run", "exp.toml", "--seed", "9", "--out", "runs/pde9"],
        dir.path(),
    );
    assert_eq!(out2.status.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("runs/pde9/manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 9);

    let sum = brody(&["summarize", "runs"], dir.path());
    assert_eq!(sum.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&sum.stdout)).unwrap();
    let rows = parsed["runs"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    // Rows are ordered by (seed, kind, directory).
    assert_eq!(rows[0]["seed"], 7);
    assert_eq!(rows[1]["seed"], 9);
    assert_eq!(parsed["all_pass"], true);
}

#[test]
fn summarize_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_summary(dir.path()).is_err());
    let out = brody(&["summarize", "."], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_curve_accepts_valid_and_rejects_broken_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("line.curve");
    fs::write(
        &good,
        "brody-curve v1\nN 1\nkind rational\ncomponent 1 0\ncomponent 0 0 0.25 0\n",
    )
    .unwrap();
    let out = brody(&["check-curve", "line.curve"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(report["ambient_dim"], 1);
    assert_eq!(report["constant"], false);
    assert_eq!(report["roundtrip_exact"], true);
    assert!(report["lipschitz"].as_f64().unwrap() > 0.0);

    let bad = dir.path().join("broken.curve");
    fs::write(&bad, "brody-curve v2\nN 1\n").unwrap();
    let out = brody(&["check-curve", "broken.curve"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn curve_check_experiment_kind_matches_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("w.curve"),
        "brody-curve v1\nN 1\nkind elliptic\nlattice 1 0 0 1\ncomponent 0 0 1 0\ncomponent 1 0 1 0\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::from_toml(&format!(
        "kind = \"curve-check\"\n[curve]\nfile = {:?}\n",
        dir.path().join("w.curve")
    ))
    .unwrap();
    let out_dir = dir.path().join("out");
    let outcome = run_experiment(&cfg, &out_dir).unwrap();
    assert_eq!(outcome.status, 0, "invariants: {:?}", outcome.manifest.invariants);
    assert!(out_dir.join("curve.report.json").exists());
}

#[test]
fn manifest_wall_time_is_the_only_varying_field() {
    let cfg =
        ExperimentConfig::from_toml("kind = \"pde-selftest\"\nseed = 3\n[pde]\nsamples = 4\ngrid = 32\n")
            .unwrap();
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&cfg, da.path()).unwrap();
    run_experiment(&cfg, db.path()).unwrap();
    let mut a: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(da.path().join("manifest.json")).unwrap(),
    )
    .unwrap();
    let mut b: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(db.path().join("manifest.json")).unwrap(),
    )
    .unwrap();
    a["wall_time_secs"] = 0.into();
    b["wall_time_secs"] = 0.into();
    assert_eq!(a, b);
}
