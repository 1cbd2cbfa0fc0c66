use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn stmodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stmodes")).args(args).output().expect("binary runs")
}

fn run(cmd: &str, cfg: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = config(cfg);
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    stmodes(&args)
}

#[test]
fn validity_flags_the_short_pump() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("validity", "bbo-short.cfg", dir.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("validity.txt")).unwrap();
    assert!(report.contains("tau_pass = false"), "{report}");
    assert!(report.contains("w_comfortable = false"), "{report}");
    assert!(dir.path().join("metadata.txt").exists());
}

#[test]
fn decompose_writes_requested_modes_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("decompose", "bbo-long.cfg", dir.path(), &["--grid", "16x48", "--modes", "3", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("first bend"), "{stdout}");
    let modes: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("mode_"))
        .collect();
    assert_eq!(modes.len(), 3);
    assert!(modes.iter().all(|e| e.path().extension().unwrap() == "csv"));
    let meta = fs::read_to_string(dir.path().join("metadata.txt")).unwrap();
    assert!(meta.contains("grid = \"16x48\""), "{meta}");
}

#[test]
fn gaussian_with_fixed_mu() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("gaussian", "bbo-long.cfg", dir.path(), &["--grid", "16x48", "--mu", "2.6721"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(dir.path().join("gaussian.csv")).unwrap();
    assert!(table.starts_with("quantity,value,unit"));
    assert!(table.lines().any(|l| l.starts_with("xi_t,9.923")), "{table}");
}

#[test]
fn phasematch_emits_grids() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("phasematch", "bbo-long.cfg", dir.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("phasematch_constants.csv").exists());
    assert!(fs::read_dir(dir.path()).unwrap().any(|e| e.unwrap().file_name().to_string_lossy().ends_with(".bin")));
}

#[test]
fn missing_config_fails_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    let o = stmodes(&["compare", "--config", "/nonexistent.cfg", "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error: config:"), "{err}");
}

#[test]
fn bad_flags_fail_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [["--grid", "3by4"], ["--mu", "-1"], ["--format", "png"]] {
        let o = run("gaussian", "bbo-long.cfg", dir.path(), &extra);
        assert!(!o.status.success(), "{extra:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains("config:") && err.contains(extra[0].trim_start_matches('-')), "{extra:?}: {err}");
    }
}

#[test]
fn model_errors_name_their_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("narrow.cfg");
    let text = fs::read_to_string(config("bbo-long.cfg")).unwrap().replace("waist = 100.0", "waist = 5.0");
    fs::write(&cfg, text).unwrap();
    let o = stmodes(&["gaussian", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap(), "--mu", "2.0"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error: gaussian:"), "{err}");
}
