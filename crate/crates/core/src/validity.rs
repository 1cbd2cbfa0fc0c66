//! Applicability bounds of the nearly plane-wave and monochromatic pump
//! approximation (NPMPA) from temporal and spatial walk-off.

use std::f64::consts::PI;

use crate::dispersion::Medium;
use crate::kernel::{FilterSpec, PumpSpec};
use crate::phasematch::PqdaParams;
use crate::units::SQRT_2LN2;
use crate::Result;

/// Default pass threshold for τ_p/τ_NPMPA and w_p/w_NPMPA.
pub const PASS_RATIO: f64 = 1.0;
/// "Comfortable" threshold, also reported.
pub const COMFORTABLE_RATIO: f64 = 2.0;

/// Published estimate of w_NPMPA for the BBO configuration [μm], used only
/// for the discrepancy flag.
pub const PUBLISHED_W_NPMPA: f64 = 21.4;
/// Published ρ_pL for the BBO configuration [μm].
pub const PUBLISHED_RHO_P_L: f64 = -67.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// max τ_wo = |k₀′ − k_p′|L [fs]
    pub tau_wo_max: f64,
    /// max|x_wo| = k₀′Ω_max q_x,max L/k₀² [μm]
    pub x_wo_max: f64,
    /// max|y_wo| = k₀′Ω_max q_y,max L/k₀² [μm]
    pub y_wo_max: f64,
    /// Pump walk-off angle [rad].
    pub rho_p: f64,
    /// ρ_pL [μm]
    pub rho_p_l: f64,
    /// (√(2ln2)/π)·max τ_wo [fs]
    pub tau_npmpa: f64,
    /// (1/π)·max{|x_wo|, |y_wo + ρ_pL|} [μm]
    pub w_npmpa: f64,
}

impl ValidityReport {
    /// Relative deviation of w_NPMPA from the published estimate.
    pub fn w_discrepancy(&self) -> f64 {
        (self.w_npmpa - PUBLISHED_W_NPMPA) / PUBLISHED_W_NPMPA
    }

    /// True when w_NPMPA differs from the published estimate by more than 10%.
    pub fn w_discrepancy_flag(&self) -> bool {
        self.w_discrepancy().abs() > 0.1
    }
}

/// Walk-off quantities and NPMPA thresholds. ρ_p is evaluated with the
/// indices at the subharmonic ω₀.
pub fn walkoff_quantities(medium: &Medium, pqda: &PqdaParams, filter: &FilterSpec) -> Result<ValidityReport> {
    let c = &pqda.coeffs;
    let l = pqda.length;
    let tau_wo_max = (c.k0p - c.kpp).abs() * l;
    let deflection = c.k0p * filter.omega_max * l / (c.k0 * c.k0);
    let x_wo_max = deflection * filter.qx_max.abs().max(filter.qx_min.abs());
    let y_wo_max = deflection * filter.qy_max;
    let rho_p = rho_p(medium, medium.omega0())?;
    let rho_p_l = rho_p * l;
    let tau_npmpa = SQRT_2LN2 / PI * tau_wo_max;
    let w_npmpa = x_wo_max.max(rho_p_l.abs() + y_wo_max) / PI;
    Ok(ValidityReport {
        tau_wo_max,
        x_wo_max,
        y_wo_max,
        rho_p,
        rho_p_l,
        tau_npmpa,
        w_npmpa,
    })
}

/// ρ_p = (n_z²/n_o² − n_z²/n_e²) sinθ₀ cosθ₀ with the indices at `omega`.
pub fn rho_p(medium: &Medium, omega: f64) -> Result<f64> {
    let cr = &medium.crystal;
    let no = cr.n_o(omega)?;
    let ne = cr.n_e(omega)?;
    let nz = cr.n_z(omega)?;
    let (s, c) = cr.cut_angle.sin_cos();
    Ok((nz * nz / (no * no) - nz * nz / (ne * ne)) * s * c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub tau_ratio: f64,
    pub w_ratio: f64,
    pub tau_pass: bool,
    pub w_pass: bool,
    pub tau_comfortable: bool,
    pub w_comfortable: bool,
}

impl Verdict {
    pub fn passes(&self) -> bool {
        self.tau_pass && self.w_pass
    }
}

/// Compare a pump against the thresholds (τ_p and w_p as FWHM duration and
/// waist).
pub fn npmpa_bounds(report: &ValidityReport, pump: &PumpSpec) -> Verdict {
    let tau_ratio = pump.duration / report.tau_npmpa;
    let w_ratio = pump.waist / report.w_npmpa;
    Verdict {
        tau_ratio,
        w_ratio,
        tau_pass: tau_ratio >= PASS_RATIO,
        w_pass: w_ratio >= PASS_RATIO,
        tau_comfortable: tau_ratio >= COMFORTABLE_RATIO,
        w_comfortable: w_ratio >= COMFORTABLE_RATIO,
    }
}
