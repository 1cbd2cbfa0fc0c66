use std::fs;

use stmodes::config::{parse_config_str, Format, MuChoice, RunConfig};
use stmodes::io::GridData;
use stmodes::pipeline;
use stmodes::Execution;

fn small(tp: f64, wp: f64) -> RunConfig {
    let text = format!(
        "[crystal]\nlength = 2000.0\ncut_angle = 29.62\n[pump]\nwavelength = 0.3975\nduration = {tp}\nwaist = {wp}\n[grid]\nnq = 16\nnw = 48\n[run]\nmodes = 12\n"
    );
    parse_config_str(&text).unwrap()
}

#[test]
fn small_grid_decomposition() {
    let setup = small(280.0, 100.0).resolve().unwrap();
    let dec = pipeline::decompose(&setup, 12, Execution::default()).unwrap();
    assert_eq!(dec.symmetry_residual, 0.0);
    let s = dec.normalized();
    assert_eq!(s[0], 1.0);
    assert!(s.windows(2).all(|p| p[1] <= p[0] + 1e-10));
    for (l, &(i, k)) in dec.labels.iter().take(6).enumerate() {
        assert_eq!((i, k), (0, l), "mode {}", l + 1);
    }
    let g = &dec.modes.grid;
    for a in 0..6 {
        for b in 0..6 {
            let fa = dec.modes.signal_mode(a);
            let fb = dec.modes.signal_mode(b);
            let dot: f64 = fa.iter().zip(&fb).map(|(x, y)| x * y).sum::<f64>() * g.weight();
            assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
    assert!(dec.edge_fraction(0) < 1e-3);
}

#[cfg(feature = "parallel")]
#[test]
fn parallel_and_sequential_pipelines_agree() {
    let setup = small(128.0, 49.0).resolve().unwrap();
    let a = pipeline::decompose(&setup, 8, Execution::Parallel).unwrap();
    let b = pipeline::decompose(&setup, 8, Execution::Sequential).unwrap();
    assert_eq!(a.kernel.data, b.kernel.data);
    assert_eq!(a.labels, b.labels);
    let ca = pipeline::compare(&setup, &a, MuChoice::Fit, Execution::Parallel).unwrap();
    let cb = pipeline::compare(&setup, &b, MuChoice::Fit, Execution::Sequential).unwrap();
    assert_eq!(ca.fit.unwrap().mu, cb.fit.unwrap().mu);
}

#[test]
fn fixed_mu_comparison() {
    // Mode shapes need the production grid; 16x48 undersamples the ridge.
    let setup = small(280.0, 100.0).with_grid(32, 96).unwrap().resolve().unwrap();
    let dec = pipeline::decompose(&setup, 12, Execution::default()).unwrap();
    let cmp = pipeline::compare(&setup, &dec, MuChoice::Fixed(2.6721), Execution::default()).unwrap();
    assert!(cmp.fit.is_none());
    assert_eq!(cmp.model.mu, 2.6721);
    assert!(cmp.overlaps.entries.iter().take(4).all(|e| e.overlap > 0.99));
    assert!(cmp.overlaps.entries.iter().all(|e| e.overlap <= 1.0 + 1e-8));
}

#[test]
fn runs_write_unit_labelled_outputs() {
    let mut cfg = small(280.0, 100.0);
    cfg.format = Format::Csv;
    cfg.modes = 4;
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let exec = Execution::default();
    pipeline::run_phasematch(&cfg, &out.join("pm")).unwrap();
    pipeline::run_decompose(&cfg, &out.join("dec"), exec).unwrap();
    pipeline::run_gaussian(&cfg, &out.join("gauss"), exec).unwrap();
    pipeline::run_validity(&cfg, &out.join("val")).unwrap();
    pipeline::run_compare(&cfg, &out.join("cmp"), exec).unwrap();
    pipeline::run_spacetime(&cfg, &out.join("st"), exec).unwrap();
    for sub in ["pm", "dec", "gauss", "val", "cmp", "st"] {
        let meta = fs::read_to_string(out.join(sub).join("metadata.txt")).unwrap();
        assert!(meta.contains("[validity]") && meta.contains("# [crystal]"), "{sub}");
        for e in fs::read_dir(out.join(sub)).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "csv") {
                let text = fs::read_to_string(&p).unwrap();
                let header = text.lines().next().unwrap();
                if header.split(',').any(|c| c == "unit") {
                    continue;
                }
                for col in header.split(',') {
                    assert!(col.contains('[') && col.ends_with(']'), "{}: column {col:?} has no unit", p.display());
                }
            }
        }
    }
}

#[test]
fn binary_grids_read_back() {
    let mut cfg = small(128.0, 49.0);
    cfg.modes = 2;
    let dir = tempfile::tempdir().unwrap();
    pipeline::run_decompose(&cfg, dir.path(), Execution::default()).unwrap();
    let g = GridData::read_bin(&dir.path().join("mode_001_signal_i0_k0.bin")).unwrap();
    assert_eq!((g.rows, g.cols), (48, 16));
    assert_eq!(g.units, ["1/um".to_string(), "rad/fs".into(), "um^1/2 fs^1/2".into()]);
    let norm: f64 = g.values.iter().map(|v| v * v).sum::<f64>() * g.dx * g.dy;
    assert!((norm - 1.0).abs() < 1e-10);
}
