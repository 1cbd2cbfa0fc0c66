//! Repo-wide unit system: lengths in μm, times in fs, angular frequencies in
//! rad/fs, wave-vectors in rad/μm.

use std::f64::consts::PI;

/// Speed of light in vacuum [μm/fs].
pub const C: f64 = 0.299_792_458;

/// Conversion factor between a Gaussian intensity FWHM and the amplitude
/// width parameter used throughout: `σ = √(2 ln 2) / FWHM`.
pub const SQRT_2LN2: f64 = 1.177_410_022_515_474_7;

/// Angular frequency [rad/fs] of a vacuum wavelength [μm].
pub fn omega_from_wavelength(lambda_um: f64) -> f64 {
    2.0 * PI * C / lambda_um
}

/// Vacuum wavelength [μm] of an angular frequency [rad/fs].
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * C / omega
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg * PI / 180.0
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad * 180.0 / PI
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
