use std::fs;
use std::path::{Path, PathBuf};

use stmodes::config::{parse_config, parse_config_str, Format, MuChoice};
use stmodes::Error;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

const MINIMAL: &str = "[crystal]\nlength = 2000.0\ncut_angle = 29.62\n[pump]\nwavelength = 0.3975\nduration = 280.0\nwaist = 100.0\n";

#[test]
fn bundled_configs_parse_and_resolve() {
    for (name, tp, wp) in [("bbo-long.cfg", 280.0, 100.0), ("bbo-short.cfg", 128.0, 49.0)] {
        let cfg = parse_config(&bundled(name)).unwrap();
        assert_eq!(cfg.pump.duration, tp);
        assert_eq!(cfg.pump.waist, wp);
        assert_eq!(cfg.mu, MuChoice::Fit);
        assert_eq!(cfg.format, Format::Bin);
        let setup = cfg.resolve().unwrap();
        assert!(setup.grid.covers(&setup.filter));
        assert!(setup.grid.mirror_aligned());
        assert!((setup.pqda.big_q0 - 0.08103).abs() < 1e-4);
    }
}

#[test]
fn missing_file_is_a_config_error() {
    let err = parse_config(Path::new("/nonexistent/run.cfg")).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
    assert!(err.to_string().contains("/nonexistent/run.cfg"));
}

#[test]
fn unknown_keys_are_named() {
    let text = MINIMAL.replace("waist = 100.0", "waist = 100.0\nwaste = 3.0");
    let msg = parse_config_str(&text).unwrap_err().to_string();
    assert!(msg.contains("waste"), "{msg}");
    let text = format!("{MINIMAL}[grid]\nnx = 4\n");
    assert!(parse_config_str(&text).unwrap_err().to_string().contains("nx"));
}

#[test]
fn malformed_syntax_is_rejected() {
    assert!(matches!(parse_config_str("[crystal\nlength = 1"), Err(Error::Config(_))));
}

#[test]
fn unit_violations_are_rejected() {
    let bad = MINIMAL.replace("length = 2000.0", "length = -2000.0");
    assert!(parse_config_str(&bad).is_err());
    let bad = MINIMAL.replace("duration = 280.0", "duration = 0.0");
    assert!(parse_config_str(&bad).is_err());
}

#[test]
fn inverted_filter_names_both_keys() {
    let text = format!("{MINIMAL}[filter]\nqx_min = 0.6\nqx_max = 0.4\n");
    let msg = parse_config_str(&text).and_then(|c| c.resolve()).unwrap_err().to_string();
    assert!(msg.contains("qx_min") && msg.contains("qx_max"), "{msg}");
}

#[test]
fn run_section_and_custom_sellmeier() {
    let text = format!(
        "{}[run]\nmu = 2.5\nmodes = 12\nformat = \"csv\"\n[[sellmeier]]\nname = \"mine\"\nordinary = [2.7405, 0.0184, 0.0179, 0.0155]\nextraordinary = [2.3730, 0.0128, 0.0156, 0.0044]\nrange = [0.22, 1.06]\n",
        MINIMAL.replace("cut_angle = 29.62", "cut_angle = 29.62\nsellmeier = \"mine\"")
    );
    let cfg = parse_config_str(&text).unwrap();
    assert_eq!(cfg.mu, MuChoice::Fixed(2.5));
    assert_eq!(cfg.modes, 12);
    assert_eq!(cfg.format, Format::Csv);
    let a = cfg.resolve().unwrap();
    let b = parse_config_str(MINIMAL).unwrap().resolve().unwrap();
    assert!((a.pqda.big_q0 - b.pqda.big_q0).abs() < 1e-12);
    let unknown = MINIMAL.replace("cut_angle = 29.62", "cut_angle = 29.62\nsellmeier = \"nope\"");
    assert!(parse_config_str(&unknown).unwrap_err().to_string().contains("nope"));
}

#[test]
fn config_from_disk_round_trips_source() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.cfg");
    fs::write(&p, MINIMAL).unwrap();
    assert_eq!(parse_config(&p).unwrap().source, MINIMAL);
}
