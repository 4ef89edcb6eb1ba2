use std::path::Path;
use std::process::{Command, Output};

use qgsynth_cli::manifest::{read_manifest, sha256_hex, MANIFEST_NAME};

fn qgsynth(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qgsynth"));
    cmd.args(args).env_remove("QGSYNTH_OUT");
    if let Some(p) = env_out {
        cmd.env("QGSYNTH_OUT", p);
    }
    cmd.output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_hashed_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let o = qgsynth(
        &["simulate", "--models", "WN,INAR", "--n", "2", "--length", "200", "--out", path(&out)],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_manifest(&out).unwrap();
    assert_eq!(m.command, "simulate");
    let mut names: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
    names.sort();
    assert_eq!(names, ["INAR_0.csv", "INAR_1.csv", "WN_0.csv", "WN_1.csv"]);
    for f in &m.files {
        let bytes = std::fs::read(out.join(&f.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), f.sha256);
        assert_eq!(bytes.len() as u64, f.bytes);
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env-out");
    let o = qgsynth(&["simulate", "--models", "WN", "--n", "1", "--length", "100"], Some(&out));
    assert!(o.status.success());
    assert!(out.join("WN_0.csv").exists());
    assert!(out.join(MANIFEST_NAME).exists());
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let out = dir.path().join("cfg");
    std::fs::write(&cfg, format!("# corpus\nmodels = AR1_0.5\nn = 3\nlength = 150\nout = {}\n", path(&out))).unwrap();
    let o = qgsynth(&["simulate", "--config", path(&cfg), "--n", "1"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_manifest(&out).unwrap();
    assert_eq!(m.files.len(), 1);
    assert_eq!(m.files[0].path, "AR1_0.5_0.csv");
}

#[test]
fn synth_then_features_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let syn = dir.path().join("syn");
    let feat = dir.path().join("feat");
    let run = |args: &[&str]| {
        let o = qgsynth(args, None);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    run(&["simulate", "--models", "AR1_0.9", "--n", "2", "--length", "300", "--out", path(&sim)]);
    run(&["synth", "--input", path(&sim), "--quantiles", "10", "--replicas", "2", "--out", path(&syn)]);
    let m = read_manifest(&syn).unwrap();
    assert_eq!(m.files.len(), 4);
    assert!(m.files.iter().any(|f| f.path == "AR1_0.9_1_synth_r1.csv"));
    run(&["features", "--input", path(&sim), "--input", path(&syn), "--out", path(&feat)]);
    let table = std::fs::read_to_string(feat.join("features_stats.csv")).unwrap();
    assert!(table.starts_with("series_id,model,origin,"));
    assert_eq!(table.lines().count(), 7);
    assert!(feat.join("paired_diffs_stats.csv").exists());
}

#[test]
fn exit_codes_distinguish_bad_input_from_io() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let o = qgsynth(&["simulate", "--models", "NOPE", "--out", path(&out)], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join(MANIFEST_NAME).exists());

    let o = qgsynth(&["simulate", "--length", "-3", "--out", path(&out)], None);
    assert_eq!(o.status.code(), Some(1));

    let missing = dir.path().join("absent.csv");
    let o = qgsynth(&["synth", "--input", path(&missing), "--out", path(&out)], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("qgsynth: "));
}

#[test]
fn failed_run_removes_stale_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = qgsynth(&["simulate", "--models", "WN", "--n", "1", "--length", "100", "--out", path(&out)], None);
    assert!(o.status.success());
    assert!(out.join(MANIFEST_NAME).exists());
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "value\n1\nabc\n").unwrap();
    let o = qgsynth(&["synth", "--input", path(&bad), "--out", path(&out)], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join(MANIFEST_NAME).exists());
}
