//! Phase mismatch, phase-matching function and the paraxial/quadratic
//! (PQDA) geometry of the down-conversion cones.

use crate::dispersion::{DispersionCoeffs, Medium};
use crate::kernel::FilterSpec;
use crate::units::{sinc, SQRT_2LN2};
use crate::{Error, Result};

/// Width-matching constant between `sinc` and a Gaussian of equal FWHM.
pub const SIGMA_S: f64 = 1.61;

/// Which dispersion model evaluates the mismatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Model {
    #[default]
    Exact,
    Pqda,
}

/// A spectral point: transverse wave-vector (q_x, q_y) [rad/μm] and
/// frequency offset Ω [rad/fs].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub qx: f64,
    pub qy: f64,
    pub omega: f64,
}

impl Point {
    pub const fn new(qx: f64, qy: f64, omega: f64) -> Self {
        Self { qx, qy, omega }
    }
}

/// Δ = k_z(a) + k_z(b) − k_pz(q_a+q_b, Ω_a+Ω_b), exact dispersion [rad/μm].
pub fn mismatch(medium: &Medium, a: Point, b: Point) -> Result<f64> {
    let ka = medium.k_z(a.qx, a.qy, a.omega)?;
    let kb = medium.k_z(b.qx, b.qy, b.omega)?;
    let kp = medium.k_pz(a.qx + b.qx, a.qy + b.qy, a.omega + b.omega)?;
    Ok(ka + kb - kp)
}

/// Exact Φ₀(q, Ω) = sinc(Δ(q, Ω; −q, −Ω)·L/2).
pub fn phi0(medium: &Medium, qx: f64, qy: f64, omega: f64) -> Result<f64> {
    let d = mismatch(
        medium,
        Point::new(qx, qy, omega),
        Point::new(-qx, -qy, -omega),
    )?;
    Ok(sinc(0.5 * d * medium.length()))
}

/// Characteristic PQDA parameters of a crystal/filter combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqdaParams {
    pub coeffs: DispersionCoeffs,
    /// L [μm]
    pub length: f64,
    /// γ = q_d²/2Q₀² [rad]
    pub gamma: f64,
    /// Collinear mismatch phase (2k₀ − k_p)L/2 [rad].
    pub gamma_collinear: f64,
    /// q_d = k₀ sin θ_s [rad/μm]
    pub q_d: f64,
    /// θ_s [rad], from cos θ_s = k_p/2k₀.
    pub theta_s: f64,
    /// Ω₀ = (k₀″L)^{−1/2} [rad/fs]
    pub big_omega0: f64,
    /// Q₀ = (k₀/L)^{1/2} [rad/μm]
    pub big_q0: f64,
    /// η_s = √2σ_sQ₀²/q_d [rad/μm]
    pub eta_s: f64,
    /// Ω_max [rad/fs]
    pub omega_max: f64,
    /// τ₀ = √(2ln2)/Ω_max [fs]
    pub tau0: f64,
    /// w₀ = 1/η_s [μm]
    pub w0: f64,
}

impl PqdaParams {
    /// Parameters with Ω_max set by the mirror rule Ω_max = Ω^(pm)(q_d + 2Q₀).
    pub fn new(medium: &Medium) -> Result<Self> {
        let length = medium.length();
        if !(length > 0.0) {
            return Err(Error::Config(format!("crystal length must be positive, got {length}")));
        }
        let coeffs = medium.taylor_coefficients()?;
        let cos_s = coeffs.kp / (2.0 * coeffs.k0);
        if !(cos_s < 1.0) {
            return Err(Error::Domain(format!(
                "no noncollinear matching: k_p/2k₀ = {cos_s:.8} ≥ 1"
            )));
        }
        let theta_s = cos_s.acos();
        let q_d = coeffs.k0 * theta_s.sin();
        let big_q0 = (coeffs.k0 / length).sqrt();
        let big_omega0 = (1.0 / (coeffs.k0pp * length)).sqrt();
        let eta_s = std::f64::consts::SQRT_2 * SIGMA_S * big_q0 * big_q0 / q_d;
        let mut p = Self {
            coeffs,
            length,
            gamma: q_d * q_d / (2.0 * big_q0 * big_q0),
            gamma_collinear: 0.5 * (2.0 * coeffs.k0 - coeffs.kp) * length,
            q_d,
            theta_s,
            big_omega0,
            big_q0,
            eta_s,
            omega_max: 0.0,
            tau0: 0.0,
            w0: 1.0 / eta_s,
        };
        p.set_omega_max(p.omega_pm(p.qx_max_rule())?);
        Ok(p)
    }

    fn set_omega_max(&mut self, omega_max: f64) {
        self.omega_max = omega_max;
        self.tau0 = SQRT_2LN2 / omega_max;
    }

    /// Lower mirror edge q_d − 2η_s.
    pub fn qx_min_rule(&self) -> f64 {
        self.q_d - 2.0 * self.eta_s
    }

    /// Upper mirror edge q_d + 2Q₀.
    pub fn qx_max_rule(&self) -> f64 {
        self.q_d + 2.0 * self.big_q0
    }

    /// Matched frequency on the PQDA hyperboloid, Ω₀√(|q|²/Q₀² − 2γ).
    pub fn omega_pm(&self, q_abs: f64) -> Result<f64> {
        let arg = q_abs * q_abs / (self.big_q0 * self.big_q0) - 2.0 * self.gamma;
        // Tolerate rounding at the vertex itself.
        if arg < -1e-12 {
            return Err(Error::Domain(format!(
                "|q| = {q_abs} rad/μm below the cone vertex q_d = {} rad/μm",
                self.q_d
            )));
        }
        Ok(self.big_omega0 * arg.max(0.0).sqrt())
    }

    /// Paraboloid approximation of the matched q_x at (q_y, Ω).
    pub fn qx_pm(&self, qy: f64, omega: f64) -> f64 {
        let r = self.big_q0 / self.big_omega0;
        self.q_d + r * r * omega * omega / (2.0 * self.q_d) - qy * qy / (2.0 * self.q_d)
    }

    /// PQDA Φ₀ = sinc(γ + Ω²/2Ω₀² − |q|²/2Q₀²).
    pub fn phi0_pqda(&self, q_abs: f64, omega: f64) -> f64 {
        let a = omega / self.big_omega0;
        let b = q_abs / self.big_q0;
        sinc(self.gamma + 0.5 * a * a - 0.5 * b * b)
    }
}

/// PQDA parameters for an explicit filter: Ω_max and τ₀ follow the filter.
pub fn pqda_params(medium: &Medium, filter: &FilterSpec) -> Result<PqdaParams> {
    let mut p = PqdaParams::new(medium)?;
    p.set_omega_max(filter.omega_max);
    Ok(p)
}

/// Φ₀ under the selected model.
pub fn phi0_with(medium: &Medium, pqda: &PqdaParams, model: Model, qx: f64, qy: f64, omega: f64) -> Result<f64> {
    match model {
        Model::Exact => phi0(medium, qx, qy, omega),
        Model::Pqda => Ok(pqda.phi0_pqda(qx.hypot(qy), omega)),
    }
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, what: &str) -> Result<f64> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Domain(format!("no {what} in [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn degenerate_mismatch(medium: &Medium, q_abs: f64, omega: f64) -> Result<f64> {
    mismatch(medium, Point::new(q_abs, 0.0, omega), Point::new(-q_abs, 0.0, -omega))
}

/// Frequency Ω ≥ 0 where the exact degenerate mismatch Δ(q, Ω; −q, −Ω)
/// vanishes, searched in [0, omega_hi].
pub fn matched_omega_exact(medium: &Medium, q_abs: f64, omega_hi: f64) -> Result<f64> {
    bisect(|w| degenerate_mismatch(medium, q_abs, w), 0.0, omega_hi, "matched frequency")
}

/// |q| where the exact degenerate mismatch vanishes at frequency Ω,
/// searched in [q_lo, q_hi].
pub fn matched_q_exact(medium: &Medium, omega: f64, q_lo: f64, q_hi: f64) -> Result<f64> {
    bisect(|q| degenerate_mismatch(medium, q, omega), q_lo, q_hi, "matched |q|")
}
