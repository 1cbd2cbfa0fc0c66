//! Run orchestration: one function per subcommand, each writing its
//! artifacts and a metadata file into an output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::analysis::{self, OverlapTable, SeriesStructure};
use crate::config::{Format, MuChoice, RunConfig, Setup};
use crate::decomposition::{self, Eigenpairs, ModeSet};
use crate::gaussian::{self, GaussianModel, MuFit, SchmidtReport};
use crate::io::{fmt, GridData, Table};
use crate::kernel::{self, Axis, KernelMatrix};
use crate::phasematch::{self, Model};
use crate::units::rad_to_deg;
use crate::validity::{self, ValidityReport, Verdict};
use crate::{Execution, Result, Stage, StageExt};

/// Values beyond this many are ignored when locating bends.
pub const BEND_SEARCH_LEN: usize = 160;
/// Modes averaged in the μ fit.
pub const FIT_MODES: usize = 6;

/// Numerical decomposition of one configuration.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub kernel: KernelMatrix,
    pub pairs: Eigenpairs,
    pub modes: ModeSet,
    /// Classified (i, k) of each stored mode.
    pub labels: Vec<(usize, usize)>,
    pub structure: SeriesStructure,
    pub symmetry_residual: f64,
}

impl Decomposition {
    /// Normalized values s_n/s₁.
    pub fn normalized(&self) -> Vec<f64> {
        let s1 = self.modes.values[0];
        self.modes.values.iter().map(|s| s / s1).collect()
    }

    /// 0-based index of the first stored mode with spatial order ≥ 1.
    pub fn first_spatial(&self) -> Option<usize> {
        self.labels.iter().position(|&(i, _)| i >= 1)
    }

    /// Fraction of the norm of mode `l` on the outermost grid cells.
    pub fn edge_fraction(&self, l: usize) -> f64 {
        let g = &self.modes.grid;
        let f = self.modes.signal_mode(l);
        let (nq, nw) = (g.qx.len, g.omega.len);
        let mut edge = 0.0;
        for iq in 0..nq {
            for iw in 0..nw {
                if iq == 0 || iq == nq - 1 || iw == 0 || iw == nw - 1 {
                    edge += f[g.index(iq, iw)].powi(2);
                }
            }
        }
        edge * g.weight()
    }
}

/// Kernel, spectral decomposition, classification and series structure,
/// keeping the functions of the first `count` modes.
pub fn decompose(setup: &Setup, count: usize, exec: Execution) -> Result<Decomposition> {
    let raw = kernel::build_jsa_with(&setup.medium, &setup.pump, &setup.filter, &setup.grid, exec).stage(Stage::Kernel)?;
    let symmetry_residual = kernel::symmetry_residual(&raw);
    let kernel = kernel::apply_quadrature(raw).stage(Stage::Kernel)?;
    let pairs = decomposition::spectral_decompose(&kernel).stage(Stage::Decomposition)?;
    let modes = decomposition::takagi_reduce(&pairs, count).stage(Stage::Decomposition)?;
    let labels = analysis::classify_modes(&modes, count, exec).stage(Stage::Analysis)?;
    let head: Vec<f64> = modes
        .values
        .iter()
        .take(BEND_SEARCH_LEN)
        .copied()
        .take_while(|&s| s > 1e-9 * modes.values[0])
        .collect();
    let structure = analysis::series_structure(&head).stage(Stage::Analysis)?;
    Ok(Decomposition {
        kernel,
        pairs,
        modes,
        labels,
        structure,
        symmetry_residual,
    })
}

/// μ fit and overlap table.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub fit: Option<MuFit>,
    pub model: GaussianModel,
    pub overlaps: OverlapTable,
    /// 1-based index of the first mode with i ≥ 1.
    pub first_spatial: Option<usize>,
    /// μ whose analytic first spatial index matches the numerical bend.
    pub bend_mu: Option<f64>,
}

/// Labels used for the fit: those of the first [`FIT_MODES`] modes.
pub fn fit_labels(dec: &Decomposition) -> Vec<(usize, usize)> {
    dec.labels.iter().take(FIT_MODES).copied().collect()
}

pub fn compare(setup: &Setup, dec: &Decomposition, mu: MuChoice, exec: Execution) -> Result<Comparison> {
    let labels = fit_labels(dec);
    let (fit, mu) = match mu {
        MuChoice::Fixed(v) => (None, v),
        MuChoice::Fit => {
            let f = gaussian::fit_mu(&dec.modes, &labels, &setup.pqda, &setup.pump, &setup.filter, exec)
                .stage(Stage::Gaussian)?;
            let v = f.mu;
            (Some(f), v)
        }
    };
    let model = gaussian::model_params(&setup.pqda, &setup.pump, &setup.filter, mu).stage(Stage::Gaussian)?;
    let mut indices: Vec<usize> = (0..labels.len()).collect();
    let first_spatial = dec.first_spatial();
    if let Some(b) = first_spatial {
        indices.extend([b, b + 1].iter().filter(|&&i| i < dec.modes.len() && i >= labels.len()));
    }
    let idx_labels: Vec<(usize, usize)> = indices.iter().map(|&i| dec.labels[i]).collect();
    let overlaps = analysis::overlap_table(&dec.modes, &model, &indices, &idx_labels).stage(Stage::Analysis)?;
    let bend_mu = dec
        .structure
        .first_bend()
        .and_then(|b| bend_matching_mu(setup, b).ok());
    Ok(Comparison {
        fit,
        model,
        overlaps,
        first_spatial: first_spatial.map(|b| b + 1),
        bend_mu,
    })
}

/// μ′ placing the analytic first spatial index ⌊M⌋ + 2 at the numerical
/// bend `bend` (1-based): M = bend − 1.5.
pub fn bend_matching_mu(setup: &Setup, bend: usize) -> Result<f64> {
    gaussian::mu_for_series_length(&setup.pqda, &setup.pump, &setup.filter, bend as f64 - 1.5)
}

/// Report of the analytic model at one μ.
#[derive(Debug, Clone)]
pub struct GaussianReport {
    pub model: GaussianModel,
    pub schmidt: SchmidtReport,
    pub g_experimental: f64,
}

pub fn gaussian_report(setup: &Setup, mu: f64) -> Result<GaussianReport> {
    let model = gaussian::model_params(&setup.pqda, &setup.pump, &setup.filter, mu).stage(Stage::Gaussian)?;
    Ok(GaussianReport {
        model,
        schmidt: gaussian::schmidt_numbers(&model),
        g_experimental: gaussian::coupling_experimental(&setup.pqda, &setup.pump, setup.filter.omega_max, mu),
    })
}

pub fn validity_report(setup: &Setup) -> Result<(ValidityReport, Verdict)> {
    let r = validity::walkoff_quantities(&setup.medium, &setup.pqda, &setup.filter).stage(Stage::Validity)?;
    let v = validity::npmpa_bounds(&r, &setup.pump);
    Ok((r, v))
}

/// A finished run: files written, relative to the output directory.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
}

struct Out<'a> {
    dir: &'a Path,
    format: Format,
    art: Artifacts,
}

impl<'a> Out<'a> {
    fn new(dir: &'a Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).map_err(crate::Error::from).stage(Stage::Output)?;
        Ok(Self {
            dir,
            format,
            art: Artifacts::default(),
        })
    }

    fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        t.write(&self.dir.join(name)).stage(Stage::Output)?;
        self.art.files.push(name.into());
        Ok(())
    }

    fn grid(&mut self, stem: &str, g: &GridData) -> Result<()> {
        let name = format!("{stem}.{}", self.format.extension());
        let path = self.dir.join(&name);
        match self.format {
            Format::Bin => g.write_bin(&path),
            Format::Csv => fs::write(&path, g.to_csv()).map_err(Into::into),
        }
        .stage(Stage::Output)?;
        self.art.files.push(name.into());
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.dir.join(name), body).map_err(crate::Error::from).stage(Stage::Output)?;
        self.art.files.push(name.into());
        Ok(())
    }

    fn say(&mut self, line: String) {
        self.art.summary.push(line);
    }

    fn metadata(mut self, cfg: &RunConfig, setup: &Setup, command: &str, extra: &str) -> Result<Artifacts> {
        let mut m = String::new();
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let _ = writeln!(m, "timestamp_unix_s = {stamp}");
        let _ = writeln!(m, "program = \"stmodes {}\"", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(m, "command = \"{command}\"");
        let _ = writeln!(m, "grid = \"{}x{}\"", setup.grid.qx.len, setup.grid.omega.len);
        let _ = writeln!(m, "mu = \"{}\"", cfg.mu);
        m.push_str(extra);
        if let Ok((r, v)) = validity_report(setup) {
            m.push_str("\n[validity]\n");
            m.push_str(&validity_text(&r, &v));
        }
        m.push_str("\n# configuration as read\n");
        for line in cfg.source.lines() {
            let _ = writeln!(m, "# {line}");
        }
        self.text("metadata.txt", &m)?;
        Ok(self.art)
    }
}

fn validity_text(r: &ValidityReport, v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "tau_wo_max_fs = {}", fmt(r.tau_wo_max));
    let _ = writeln!(s, "x_wo_max_um = {}", fmt(r.x_wo_max));
    let _ = writeln!(s, "y_wo_max_um = {}", fmt(r.y_wo_max));
    let _ = writeln!(s, "rho_p_rad = {}", fmt(r.rho_p));
    let _ = writeln!(s, "rho_p_L_um = {}", fmt(r.rho_p_l));
    let _ = writeln!(s, "tau_npmpa_fs = {}", fmt(r.tau_npmpa));
    let _ = writeln!(s, "w_npmpa_um = {}", fmt(r.w_npmpa));
    let _ = writeln!(
        s,
        "w_npmpa_published_um = {} # relative deviation {:+.3}, flagged = {}",
        validity::PUBLISHED_W_NPMPA,
        r.w_discrepancy(),
        r.w_discrepancy_flag()
    );
    let _ = writeln!(s, "tau_ratio = {}", fmt(v.tau_ratio));
    let _ = writeln!(s, "w_ratio = {}", fmt(v.w_ratio));
    let _ = writeln!(s, "tau_pass = {} # ratio >= {}", v.tau_pass, validity::PASS_RATIO);
    let _ = writeln!(s, "w_pass = {}", v.w_pass);
    let _ = writeln!(s, "tau_comfortable = {} # ratio >= {}", v.tau_comfortable, validity::COMFORTABLE_RATIO);
    let _ = writeln!(s, "w_comfortable = {}", v.w_comfortable);
    s
}

/// Φ₀ (exact and PQDA) on a rectangular grid at q_y = 0.
pub fn run_phasematch(cfg: &RunConfig, out: &Path) -> Result<Artifacts> {
    let setup = cfg.resolve().stage(Stage::Config)?;
    let mut o = Out::new(out, cfg.format)?;
    let n = 256;
    let qx = Axis::midpoints(0.0, 1.25 * setup.filter.qx_max, n);
    let om = Axis::midpoints(-1.25 * setup.filter.omega_max, 1.25 * setup.filter.omega_max, n);
    for (model, stem) in [(Model::Exact, "phi0_exact"), (Model::Pqda, "phi0_pqda")] {
        let mut v = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                v.push(
                    phasematch::phi0_with(&setup.medium, &setup.pqda, model, qx.value(i), 0.0, om.value(j))
                        .stage(Stage::PhaseMatch)?,
                );
            }
        }
        o.grid(stem, &GridData::from_x_major(&qx, &om, &v, ["1/um", "rad/fs", "1"])?)?;
    }
    let p = &setup.pqda;
    let mut t = Table::new(&["quantity", "value", "unit"]);
    let rows: [(&str, f64, &str); 13] = [
        ("k0", p.coeffs.k0, "rad/um"),
        ("k0_prime", p.coeffs.k0p, "fs/um"),
        ("k0_second", p.coeffs.k0pp, "fs^2/um"),
        ("kp", p.coeffs.kp, "rad/um"),
        ("kp_prime", p.coeffs.kpp, "fs/um"),
        ("Q0", p.big_q0, "rad/um"),
        ("Omega0", p.big_omega0, "rad/fs"),
        ("gamma", p.gamma, "rad"),
        ("q_d", p.q_d, "rad/um"),
        ("theta_s", rad_to_deg(p.theta_s), "deg"),
        ("Omega_max", setup.filter.omega_max, "rad/fs"),
        ("tau0", p.tau0, "fs"),
        ("w0", p.w0, "um"),
    ];
    for (name, v, u) in rows {
        t.push(vec![name.into(), fmt(v), u.into()]);
        o.say(format!("{name} = {v:.6} {u}"));
    }
    o.table("phasematch_constants.csv", &t)?;
    o.metadata(cfg, &setup, "phasematch", "")
}

/// Singular value table, mode grids and series structure.
pub fn run_decompose(cfg: &RunConfig, out: &Path, exec: Execution) -> Result<Artifacts> {
    let setup = cfg.resolve().stage(Stage::Config)?;
    let dec = decompose(&setup, cfg.modes, exec)?;
    let mut o = Out::new(out, cfg.format)?;
    write_spectrum(&mut o, &dec)?;
    for l in 0..dec.modes.len() {
        let (i, k) = dec.labels[l];
        let c = dec.modes.signal_mode(l);
        o.grid(&format!("mode_{:03}_signal_i{i}_k{k}", l + 1), &GridData::spectral(&setup.grid, &c, "um^1/2 fs^1/2")?)?;
    }
    let bend = dec.structure.first_bend();
    o.say(format!("first bend at n = {}", bend.map_or("-".into(), |b| b.to_string())));
    if let Some(b) = dec.first_spatial() {
        o.say(format!("first spatial mode {:?} at n = {}", dec.labels[b], b + 1));
    }
    let extra = decomposition_metadata(&dec);
    o.metadata(cfg, &setup, "decompose", &extra)
}

fn decomposition_metadata(dec: &Decomposition) -> String {
    let mut m = String::from("\n[convergence]\n");
    let v = dec.normalized();
    let _ = writeln!(m, "symmetry_residual = {:e}", dec.symmetry_residual);
    let _ = writeln!(m, "last_normalized_value = {:e}", v[v.len() - 1]);
    let all = &dec.modes.values;
    let _ = writeln!(m, "smallest_normalized_value = {:e}", all[all.len() - 1] / all[0]);
    let _ = writeln!(m, "mode1_edge_fraction = {:e}", dec.edge_fraction(0));
    let _ = writeln!(m, "schmidt_number_numerical = {}", fmt(schmidt_number(all)));
    m
}

/// (Σs²)²/Σs⁴.
pub fn schmidt_number(values: &[f64]) -> f64 {
    let s2: f64 = values.iter().map(|s| s * s).sum();
    let s4: f64 = values.iter().map(|s| s.powi(4)).sum();
    s2 * s2 / s4
}

fn write_spectrum(o: &mut Out<'_>, dec: &Decomposition) -> Result<()> {
    let mut t = Table::new(&["index [1]", "s [1]", "s_norm [1]", "ln_s_norm [1]", "phase [-]", "i [1]", "k [1]"]);
    let v = &dec.modes.values;
    for n in 0..v.len() {
        let (i, k) = dec
            .labels
            .get(n)
            .map_or(("".into(), "".into()), |&(i, k)| (i.to_string(), k.to_string()));
        t.push(vec![
            (n + 1).to_string(),
            fmt(v[n]),
            fmt(v[n] / v[0]),
            fmt((v[n] / v[0]).ln()),
            dec.modes.phases[n].label().to_string(),
            i,
            k,
        ]);
    }
    o.table("singular_values.csv", &t)?;
    let mut s = Table::new(&["bend_index [1]", "series_size [1]", "slope_jump [1]"]);
    for ((b, z), sc) in dec.structure.bends.iter().zip(&dec.structure.sizes).zip(&dec.structure.scores) {
        s.push(vec![b.to_string(), z.to_string(), fmt(*sc)]);
    }
    o.table("series.csv", &s)
}

fn resolve_mu(cfg: &RunConfig, setup: &Setup, exec: Execution) -> Result<(f64, Option<Decomposition>, Option<MuFit>)> {
    match cfg.mu {
        MuChoice::Fixed(v) => Ok((v, None, None)),
        MuChoice::Fit => {
            let dec = decompose(setup, cfg.modes.max(FIT_MODES), exec)?;
            let labels = fit_labels(&dec);
            let f = gaussian::fit_mu(&dec.modes, &labels, &setup.pqda, &setup.pump, &setup.filter, exec)
                .stage(Stage::Gaussian)?;
            Ok((f.mu, Some(dec), Some(f)))
        }
    }
}

fn fit_text(f: &MuFit) -> String {
    let mut s = format!("mu_fit = {}\nmean_overlap = {}\nat_boundary = {}\n", fmt(f.mu), fmt(f.mean_overlap), f.at_boundary);
    if let Some(w) = &f.warning {
        let _ = writeln!(s, "# warning: {w}");
    }
    s
}

/// Analytic model report.
pub fn run_gaussian(cfg: &RunConfig, out: &Path, exec: Execution) -> Result<Artifacts> {
    let setup = cfg.resolve().stage(Stage::Config)?;
    let (mu, _, fit) = resolve_mu(cfg, &setup, exec)?;
    let r = gaussian_report(&setup, mu)?;
    let mut o = Out::new(out, cfg.format)?;
    let m = &r.model;
    let s = &r.schmidt;
    let mut t = Table::new(&["quantity", "value", "unit"]);
    let mut rows: Vec<(&str, f64, &str)> = vec![
        ("mu", m.mu, "1"),
        ("r_x", m.r_x, "1"),
        ("r_t", m.r_t, "1"),
        ("r_y", m.r_y, "1"),
        ("xi_x", m.xi_x, "1"),
        ("xi_t", m.xi_t, "1"),
        ("u", m.u, "um"),
        ("v", m.v, "um"),
        ("tau", m.tau, "fs"),
        ("g", m.g, "1"),
        ("g_experimental", r.g_experimental, "1"),
        ("norm_2d", m.norm, "1"),
        ("K_x", s.k_x, "1"),
        ("K_t", s.k_t, "1"),
        ("K", s.k, "1"),
        ("M", s.series_length, "1"),
        ("first_spatial_index", s.first_spatial_index as f64, "1"),
        ("K0", s.k0, "1"),
        ("K0_prime", s.k0_prime, "1"),
        ("s_dis_1d_over_norm", s.disregarded.one_d, "1"),
        ("s_dis_2d_over_norm", s.disregarded.two_d, "1"),
    ];
    if let Some(xy) = m.xi_y {
        rows.push(("xi_y", xy, "1"));
    }
    if let Some(ky) = s.k_y {
        rows.push(("K_y", ky, "1"));
    }
    for (name, v, u) in rows {
        t.push(vec![name.into(), fmt(v), u.into()]);
        o.say(format!("{name} = {v:.6}"));
    }
    o.table("gaussian.csv", &t)?;
    let mut sp = Table::new(&["index [1]", "s [1]", "s_norm [1]", "i [1]", "k [1]"]);
    let spec = m.spectrum(cfg.modes);
    for (n, &(v, i, k)) in spec.iter().enumerate() {
        sp.push(vec![(n + 1).to_string(), fmt(v), fmt(v / spec[0].0), i.to_string(), k.to_string()]);
    }
    o.table("analytic_singular_values.csv", &sp)?;
    let extra = fit.map(|f| format!("\n[fit]\n{}", fit_text(&f))).unwrap_or_default();
    o.metadata(cfg, &setup, "gaussian", &extra)
}

/// Walk-off and NPMPA report.
pub fn run_validity(cfg: &RunConfig, out: &Path) -> Result<Artifacts> {
    let setup = cfg.resolve().stage(Stage::Config)?;
    let (r, v) = validity_report(&setup)?;
    let mut o = Out::new(out, cfg.format)?;
    let mut t = Table::new(&["quantity", "value", "unit"]);
    let rows: [(&str, f64, &str); 11] = [
        ("tau_wo_max", r.tau_wo_max, "fs"),
        ("x_wo_max", r.x_wo_max, "um"),
        ("y_wo_max", r.y_wo_max, "um"),
        ("rho_p", r.rho_p, "rad"),
        ("rho_p_L", r.rho_p_l, "um"),
        ("tau_npmpa", r.tau_npmpa, "fs"),
        ("w_npmpa", r.w_npmpa, "um"),
        ("w_npmpa_published", validity::PUBLISHED_W_NPMPA, "um"),
        ("w_npmpa_relative_deviation", r.w_discrepancy(), "1"),
        ("tau_ratio", v.tau_ratio, "1"),
        ("w_ratio", v.w_ratio, "1"),
    ];
    for (name, val, u) in rows {
        t.push(vec![name.into(), fmt(val), u.into()]);
    }
    for (name, flag) in [
        ("tau_pass", v.tau_pass),
        ("w_pass", v.w_pass),
        ("tau_comfortable", v.tau_comfortable),
        ("w_comfortable", v.w_comfortable),
        ("w_discrepancy_flag", r.w_discrepancy_flag()),
    ] {
        t.push(vec![name.into(), flag.to_string(), "bool".into()]);
    }
    o.table("validity.csv", &t)?;
    let text = validity_text(&r, &v);
    o.text("validity.txt", &text)?;
    o.say(format!(
        "tau_NPMPA = {:.2} fs (ratio {:.3}, {}), w_NPMPA = {:.2} um (ratio {:.3}, {})",
        r.tau_npmpa,
        v.tau_ratio,
        verdict(v.tau_pass, v.tau_comfortable),
        r.w_npmpa,
        v.w_ratio,
        verdict(v.w_pass, v.w_comfortable)
    ));
    if r.w_discrepancy_flag() {
        o.say(format!(
            "note: w_NPMPA differs from the published {} um by {:+.0}% (rho_p L = {:.1} um)",
            validity::PUBLISHED_W_NPMPA,
            100.0 * r.w_discrepancy(),
            r.rho_p_l
        ));
    }
    o.metadata(cfg, &setup, "validity", "")
}

fn verdict(pass: bool, comfortable: bool) -> &'static str {
    match (pass, comfortable) {
        (true, true) => "pass",
        (true, false) => "marginal",
        _ => "FAIL",
    }
}

/// μ fit and overlap table.
pub fn run_compare(cfg: &RunConfig, out: &Path, exec: Execution) -> Result<Artifacts> {
    let setup = cfg.resolve().stage(Stage::Config)?;
    let dec = decompose(&setup, cfg.modes, exec)?;
    let cmp = compare(&setup, &dec, cfg.mu, exec)?;
    let mut o = Out::new(out, cfg.format)?;
    let mut t = Table::new(&["index [1]", "i [1]", "k [1]", "overlap [1]"]);
    for e in &cmp.overlaps.entries {
        t.push(vec![e.index.to_string(), e.label.0.to_string(), e.label.1.to_string(), fmt(e.overlap)]);
        o.say(format!("n = {:3} {:?}: overlap {:.4}", e.index, e.label, e.overlap));
    }
    o.table("overlaps.csv", &t)?;
    if let Some(f) = &cmp.fit {
        let mut s = Table::new(&["mu [1]", "mean_overlap [1]"]);
        for &(mu, ov) in &f.scan {
            s.push(vec![fmt(mu), fmt(ov)]);
        }
        o.table("mu_scan.csv", &s)?;
        if let Some(w) = &f.warning {
            o.say(format!("warning: {w}"));
        }
    }
    o.say(format!("mu = {:.4}, mean overlap of first six = {:.4}", cmp.model.mu, cmp.overlaps.mean_first_six));
    if let Some(b) = cmp.bend_mu {
        o.say(format!("bend-matching mu' = {b:.4}"));
    }
    let mut extra = String::from("\n[compare]\n");
    let _ = writeln!(extra, "mu_used = {}", fmt(cmp.model.mu));
    let _ = writeln!(extra, "mean_overlap_first_six = {}", fmt(cmp.overlaps.mean_first_six));
    if let Some(b) = cmp.bend_mu {
        let _ = writeln!(extra, "bend_matching_mu = {}", fmt(b));
    }
    if let Some(f) = &cmp.fit {
        extra.push_str(&fit_text(f));
    }
    extra.push_str(&decomposition_metadata(&dec));
    o.metadata(cfg, &setup, "compare", &extra)
}

/// |F⁺(x,t)| of the first `modes` numerical squeezing modes, with the
/// analytic counterparts of their labels.
pub fn run_spacetime(cfg: &RunConfig, out: &Path, exec: Execution) -> Result<Artifacts> {
    let setup = cfg.resolve().stage(Stage::Config)?;
    let dec = decompose(&setup, cfg.modes, exec)?;
    let mu = match cfg.mu {
        MuChoice::Fixed(v) => v,
        MuChoice::Fit => {
            gaussian::fit_mu(&dec.modes, &fit_labels(&dec), &setup.pqda, &setup.pump, &setup.filter, exec)
                .stage(Stage::Gaussian)?
                .mu
        }
    };
    let model = gaussian::model_params(&setup.pqda, &setup.pump, &setup.filter, mu).stage(Stage::Gaussian)?;
    let mut o = Out::new(out, cfg.format)?;
    let mut t = Table::new(&["index [1]", "i [1]", "k [1]", "norm_squared [1]", "rank1_fraction [1]", "analytic_rank1_fraction [1]"]);
    let units = ["um", "fs", "um^-1/2 fs^-1/2"];
    for l in 0..dec.modes.len() {
        let (i, k) = dec.labels[l];
        let (plus, _) = dec.modes.squeezing_modes(l).stage(Stage::Analysis)?;
        let st = analysis::union_to_spacetime(&plus, cfg.pad, l).stage(Stage::Analysis)?;
        let abs = st.abs();
        let frac = analysis::rank1_fraction(&abs, st.x.len, st.t.len).stage(Stage::Analysis)?;
        o.grid(&format!("spacetime_{:03}_i{i}_k{k}", l + 1), &GridData::from_x_major(&st.x, &st.t, &abs, units)?)?;
        let (c, d) = model.analytic_mode(i, k, &setup.grid).stage(Stage::Gaussian)?;
        let (ap, _) = decomposition::squeezing_modes(&setup.grid, &c, &d).stage(Stage::Analysis)?;
        let sa = analysis::union_to_spacetime(&ap, cfg.pad, l).stage(Stage::Analysis)?;
        let aabs = sa.abs();
        let afrac = analysis::rank1_fraction(&aabs, sa.x.len, sa.t.len).stage(Stage::Analysis)?;
        o.grid(&format!("spacetime_{:03}_analytic", l + 1), &GridData::from_x_major(&sa.x, &sa.t, &aabs, units)?)?;
        t.push(vec![(l + 1).to_string(), i.to_string(), k.to_string(), fmt(st.norm_sqr()), fmt(frac), fmt(afrac)]);
    }
    o.table("spacetime.csv", &t)?;
    o.say(format!("{} modes transformed at mu = {mu:.4}", dec.modes.len()));
    let extra = decomposition_metadata(&dec);
    o.metadata(cfg, &setup, "spacetime", &extra)
}
