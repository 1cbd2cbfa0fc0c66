//! Run configuration: a TOML file with fixed units per key.
//!
//! ```toml
//! [crystal]
//! length = 2000.0          # μm
//! cut_angle = 29.62        # degrees
//! sellmeier = "BBO-Eimerl87"
//!
//! [pump]
//! wavelength = 0.3975      # μm
//! duration = 280.0         # fs, intensity FWHM
//! waist = 100.0            # μm
//!
//! [filter]                 # optional; mirror rule by default
//! qx_min = 0.338           # μm⁻¹
//! qx_max = 0.573           # μm⁻¹
//! qy_max = 0.0167          # μm⁻¹
//! omega_max = 0.409        # rad/fs
//!
//! [grid]
//! nq = 32
//! nw = 96
//! margin = 0.0             # fraction of each filter extent
//!
//! [run]
//! mu = "fit"               # or a number
//! modes = 64
//! pad = 2
//! format = "bin"           # or "csv"
//! ```
//!
//! Custom Sellmeier sets go in `[[sellmeier]]` tables with `name`,
//! `ordinary = [A, B, C, D]`, `extraordinary = [A, B, C, D]` and
//! `range = [λ_min, λ_max]` (μm).

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::dispersion::{CrystalSpec, Medium, Sellmeier, SellmeierSet};
use crate::kernel::{FilterSpec, Grid2D, PumpSpec};
use crate::phasematch::PqdaParams;
use crate::units::deg_to_rad;
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawCrystal {
    length: f64,
    cut_angle: f64,
    #[serde(default = "default_sellmeier")]
    sellmeier: String,
}

fn default_sellmeier() -> String {
    crate::dispersion::BBO_EIMERL87.to_string()
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawSellmeier {
    name: String,
    ordinary: [f64; 4],
    extraordinary: [f64; 4],
    range: [f64; 2],
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawPump {
    wavelength: f64,
    duration: f64,
    waist: f64,
    #[serde(default = "one")]
    amplitude: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    qx_min: Option<f64>,
    qx_max: Option<f64>,
    qy_max: Option<f64>,
    omega_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default = "default_nq")]
    nq: usize,
    #[serde(default = "default_nw")]
    nw: usize,
    #[serde(default)]
    margin: f64,
}

impl Default for RawGrid {
    fn default() -> Self {
        Self {
            nq: default_nq(),
            nw: default_nw(),
            margin: 0.0,
        }
    }
}

fn default_nq() -> usize {
    32
}

fn default_nw() -> usize {
    96
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
enum RawMu {
    Value(f64),
    Word(String),
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawRun {
    mu: Option<RawMu>,
    modes: Option<usize>,
    pad: Option<usize>,
    format: Option<String>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    crystal: RawCrystal,
    pump: RawPump,
    #[serde(default)]
    filter: RawFilter,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    sellmeier: Vec<RawSellmeier>,
}

/// μ fixed or fitted to the numerical modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuChoice {
    Fixed(f64),
    Fit,
}

impl MuChoice {
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("fit") {
            return Ok(Self::Fit);
        }
        match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Self::Fixed(v)),
            _ => Err(Error::Config(format!("mu must be a positive number or \"fit\", got {s:?}"))),
        }
    }
}

impl std::fmt::Display for MuChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Fixed(v) => write!(f, "{v}"),
            Self::Fit => write!(f, "fit"),
        }
    }
}

/// Grid output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Bin,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "bin" => Ok(Self::Bin),
            other => Err(Error::Config(format!("format must be \"csv\" or \"bin\", got {other:?}"))),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Bin => "bin",
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub crystal: CrystalSpec,
    pub pump: PumpSpec,
    /// `None` fields fall back to the mirror rule.
    filter: RawFilter,
    pub nq: usize,
    pub nw: usize,
    pub margin: f64,
    pub mu: MuChoice,
    pub modes: usize,
    pub pad: usize,
    pub format: Format,
    /// The file as read, echoed into run metadata.
    pub source: String,
}

pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_PAD: usize = 2;

/// Parse and validate a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let sellmeier = resolve_sellmeier(&raw.crystal.sellmeier, &raw.sellmeier)?;
    let crystal = CrystalSpec::new(raw.crystal.length, deg_to_rad(raw.crystal.cut_angle), sellmeier)?;
    let pump = PumpSpec::with_amplitude(raw.pump.wavelength, raw.pump.duration, raw.pump.waist, raw.pump.amplitude)?;
    let mu = match &raw.run.mu {
        None => MuChoice::Fit,
        Some(RawMu::Value(v)) => MuChoice::parse(&v.to_string())?,
        Some(RawMu::Word(w)) => MuChoice::parse(w)?,
    };
    let cfg = RunConfig {
        crystal,
        pump,
        filter: raw.filter,
        nq: raw.grid.nq,
        nw: raw.grid.nw,
        margin: raw.grid.margin,
        mu,
        modes: raw.run.modes.unwrap_or(DEFAULT_MODES),
        pad: raw.run.pad.unwrap_or(DEFAULT_PAD),
        format: Format::parse(raw.run.format.as_deref().unwrap_or("bin"))?,
        source: text.to_string(),
    };
    if cfg.modes == 0 {
        return Err(Error::Config("run.modes must be at least 1".into()));
    }
    if cfg.pad == 0 {
        return Err(Error::Config("run.pad must be at least 1".into()));
    }
    // Resolve once so that every geometric error surfaces at parse time.
    cfg.resolve()?;
    Ok(cfg)
}

fn resolve_sellmeier(name: &str, custom: &[RawSellmeier]) -> Result<SellmeierSet> {
    if let Some(c) = custom.iter().find(|c| c.name == name) {
        let [a, b, cc, d] = c.ordinary;
        let [ea, eb, ec, ed] = c.extraordinary;
        if !(c.range[0] > 0.0 && c.range[0] < c.range[1]) {
            return Err(Error::Config(format!("sellmeier {name:?}: range must be increasing and positive")));
        }
        return Ok(SellmeierSet {
            name: c.name.clone(),
            ordinary: Sellmeier::new(a, b, cc, d),
            extraordinary: Sellmeier::new(ea, eb, ec, ed),
            range_um: (c.range[0], c.range[1]),
        });
    }
    SellmeierSet::preset(name).ok_or_else(|| Error::Config(format!("unknown Sellmeier set {name:?}")))
}

/// Everything a run needs, derived from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Setup {
    pub medium: Medium,
    pub pqda: PqdaParams,
    pub pump: PumpSpec,
    pub filter: FilterSpec,
    pub grid: Grid2D,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Setup> {
        let medium = Medium::new(self.crystal.clone(), self.pump.wavelength)?;
        let pqda = PqdaParams::new(&medium)?;
        let rule = FilterSpec::mirror_rule(&pqda, self.pump.q_sigma())?;
        let filter = FilterSpec::new(
            self.filter.qx_min.unwrap_or(rule.qx_min),
            self.filter.qx_max.unwrap_or(rule.qx_max),
            self.filter.qy_max.unwrap_or(rule.qy_max),
            self.filter.omega_max.unwrap_or(rule.omega_max),
        )?;
        let pqda = crate::phasematch::pqda_params(&medium, &filter)?;
        let grid = Grid2D::tiling(&filter, self.nq, self.nw, self.margin)?;
        if !grid.covers(&filter) {
            return Err(Error::Config("grid does not cover the filter region".into()));
        }
        Ok(Setup {
            medium,
            pqda,
            pump: self.pump,
            filter,
            grid,
        })
    }

    pub fn with_grid(mut self, nq: usize, nw: usize) -> Result<Self> {
        self.nq = nq;
        self.nw = nw;
        self.resolve()?;
        Ok(self)
    }
}

/// Parse `NxM` grid sizes.
pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("grid must look like NxM, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LONG: &str = r#"
[crystal]
length = 2000.0
cut_angle = 29.62
sellmeier = "BBO-Eimerl87"

[pump]
wavelength = 0.3975
duration = 280.0
waist = 100.0
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse_config_str(LONG).unwrap();
        assert_eq!((c.nq, c.nw), (32, 96));
        assert_eq!(c.mu, MuChoice::Fit);
        assert_eq!(c.format, Format::Bin);
        let s = c.resolve().unwrap();
        assert!((s.filter.qx_min - 0.33804).abs() < 1e-4);
        assert!((s.filter.qx_max - 0.57288).abs() < 1e-4);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = format!("{LONG}\n[run]\nmodez = 3\n");
        let e = parse_config_str(&text).unwrap_err().to_string();
        assert!(e.contains("modez"), "{e}");
        let text = LONG.replace("waist", "wasit");
        assert!(parse_config_str(&text).unwrap_err().to_string().contains("wasit"));
    }

    #[test]
    fn reversed_filter_names_both_keys() {
        let text = format!("{LONG}\n[filter]\nqx_min = 0.6\nqx_max = 0.4\n");
        let e = parse_config_str(&text).unwrap_err().to_string();
        assert!(e.contains("qx_min") && e.contains("qx_max"), "{e}");
    }

    #[test]
    fn negative_length_is_rejected() {
        let text = LONG.replace("length = 2000.0", "length = -2000.0");
        assert!(matches!(parse_config_str(&text), Err(Error::Config(_))));
    }

    #[test]
    fn malformed_syntax_is_a_config_error() {
        assert!(matches!(parse_config_str("[crystal\nlength = 1"), Err(Error::Config(_))));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(parse_config(Path::new("/nonexistent/x.cfg")), Err(Error::Config(_))));
    }

    #[test]
    fn mu_and_format_values() {
        let c = parse_config_str(&format!("{LONG}\n[run]\nmu = 2.5\nformat = \"csv\"\n")).unwrap();
        assert_eq!(c.mu, MuChoice::Fixed(2.5));
        assert_eq!(c.format, Format::Csv);
        assert!(parse_config_str(&format!("{LONG}\n[run]\nmu = \"guess\"\n")).is_err());
        assert!(parse_config_str(&format!("{LONG}\n[run]\nmu = -1.0\n")).is_err());
        assert_eq!(MuChoice::parse("FIT").unwrap(), MuChoice::Fit);
    }

    #[test]
    fn custom_sellmeier_set() {
        let text = LONG.replace("\"BBO-Eimerl87\"", "\"my-bbo\"")
            + "\n[[sellmeier]]\nname = \"my-bbo\"\nordinary = [2.7405, 0.0184, 0.0179, 0.0155]\nextraordinary = [2.3730, 0.0128, 0.0156, 0.0044]\nrange = [0.22, 1.06]\n";
        let c = parse_config_str(&text).unwrap();
        assert_eq!(c.crystal.sellmeier.name, "my-bbo");
        assert!(parse_config_str(&LONG.replace("\"BBO-Eimerl87\"", "\"nope\"")).is_err());
    }

    #[test]
    fn grid_argument() {
        assert_eq!(parse_grid("48x144").unwrap(), (48, 144));
        assert!(parse_grid("48").is_err());
        assert!(parse_grid("ax3").is_err());
    }
}
