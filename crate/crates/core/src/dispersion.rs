//! Refractive indices and longitudinal wave-vectors of the ordinary
//! subharmonic and the extraordinary pump in a uniaxial crystal.

use crate::units::{omega_from_wavelength, wavelength_from_omega, C};
use crate::{Error, Result};

/// Sellmeier form `n² = A + B/(λ² − C) − D·λ²`, λ in μm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sellmeier {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sellmeier {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Index at a vacuum wavelength [μm], without range checking.
    pub fn index_unchecked(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        (self.a + self.b / (l2 - self.c) - self.d * l2).sqrt()
    }
}

/// Ordinary and extraordinary Sellmeier sets with their validity range.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierSet {
    pub name: String,
    pub ordinary: Sellmeier,
    pub extraordinary: Sellmeier,
    /// Valid vacuum wavelengths [μm], inclusive.
    pub range_um: (f64, f64),
}

pub const BBO_EIMERL87: &str = "BBO-Eimerl87";

impl SellmeierSet {
    /// β-BaB₂O₄, Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
    pub fn bbo_eimerl87() -> Self {
        Self {
            name: BBO_EIMERL87.to_string(),
            ordinary: Sellmeier::new(2.7405, 0.0184, 0.0179, 0.0155),
            extraordinary: Sellmeier::new(2.3730, 0.0128, 0.0156, 0.0044),
            range_um: (0.22, 1.06),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            BBO_EIMERL87 => Some(Self::bbo_eimerl87()),
            _ => None,
        }
    }

    fn check_range(&self, lambda_um: f64) -> Result<()> {
        let (lo, hi) = self.range_um;
        if lambda_um.is_finite() && lambda_um >= lo && lambda_um <= hi {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "wavelength {lambda_um:.6} μm outside the {} Sellmeier range [{lo}, {hi}] μm",
                self.name
            )))
        }
    }

    pub fn n_o(&self, lambda_um: f64) -> Result<f64> {
        self.check_range(lambda_um)?;
        Ok(self.ordinary.index_unchecked(lambda_um))
    }

    pub fn n_e(&self, lambda_um: f64) -> Result<f64> {
        self.check_range(lambda_um)?;
        Ok(self.extraordinary.index_unchecked(lambda_um))
    }
}

/// Crystal geometry. The optical axis lies in the yz plane at `cut_angle`
/// from z.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    /// Length L [μm].
    pub length: f64,
    /// Cut angle θ₀ [rad].
    pub cut_angle: f64,
    pub sellmeier: SellmeierSet,
}

impl CrystalSpec {
    pub fn new(length: f64, cut_angle: f64, sellmeier: SellmeierSet) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!(
                "crystal length must be positive, got {length} μm"
            )));
        }
        if !(cut_angle > 0.0 && cut_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config(format!(
                "cut angle must lie in (0, π/2), got {cut_angle} rad"
            )));
        }
        let (lo, hi) = sellmeier.range_um;
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::Config(format!(
                "invalid Sellmeier range [{lo}, {hi}] μm"
            )));
        }
        for i in 0..=16 {
            let lam = lo + (hi - lo) * i as f64 / 16.0;
            let no = sellmeier.ordinary.index_unchecked(lam);
            let ne = sellmeier.extraordinary.index_unchecked(lam);
            if !(no > 1.0 && ne > 1.0) {
                return Err(Error::Config(format!(
                    "Sellmeier set {} gives an index ≤ 1 at {lam:.4} μm",
                    sellmeier.name
                )));
            }
        }
        Ok(Self {
            length,
            cut_angle,
            sellmeier,
        })
    }

    /// Ordinary index at angular frequency ω [rad/fs].
    pub fn n_o(&self, omega: f64) -> Result<f64> {
        self.sellmeier.n_o(wavelength_from_omega(omega))
    }

    /// Extraordinary (principal) index at ω.
    pub fn n_e(&self, omega: f64) -> Result<f64> {
        self.sellmeier.n_e(wavelength_from_omega(omega))
    }

    /// Extraordinary index for propagation along z:
    /// `1/n_z² = sin²θ₀/n_e² + cos²θ₀/n_o²`.
    pub fn n_z(&self, omega: f64) -> Result<f64> {
        let (s, c) = self.cut_angle.sin_cos();
        let no = self.n_o(omega)?;
        let ne = self.n_e(omega)?;
        Ok(1.0 / (s * s / (ne * ne) + c * c / (no * no)).sqrt())
    }
}

/// Expansion coefficients of the ordinary wave-vector around ω₀ and the pump
/// values at its carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionCoeffs {
    /// k₀ [rad/μm]
    pub k0: f64,
    /// k₀′ = dk/dΩ [fs/μm]
    pub k0p: f64,
    /// k₀″ [fs²/μm]
    pub k0pp: f64,
    /// k_p = k_pz(0, 0) [rad/μm]
    pub kp: f64,
    /// k_p′ [fs/μm]
    pub kpp: f64,
}

/// A crystal pumped at a fixed carrier. Signal and idler are ordinary waves
/// around the subharmonic ω₀ = ω_p/2; the pump is extraordinary.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub crystal: CrystalSpec,
    omega_p: f64,
}

/// Default finite-difference step [rad/fs].
pub const DEFAULT_STEP: f64 = 1e-3;

impl Medium {
    pub fn new(crystal: CrystalSpec, pump_wavelength_um: f64) -> Result<Self> {
        if !(pump_wavelength_um.is_finite() && pump_wavelength_um > 0.0) {
            return Err(Error::Config(format!(
                "pump wavelength must be positive, got {pump_wavelength_um} μm"
            )));
        }
        let m = Self {
            crystal,
            omega_p: omega_from_wavelength(pump_wavelength_um),
        };
        m.crystal.n_e(m.omega_p)?;
        m.crystal.n_o(m.omega0())?;
        Ok(m)
    }

    pub fn length(&self) -> f64 {
        self.crystal.length
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn omega0(&self) -> f64 {
        0.5 * self.omega_p
    }

    /// k(Ω) = n_o(ω₀+Ω)(ω₀+Ω)/c.
    pub fn k(&self, big_omega: f64) -> Result<f64> {
        let w = self.omega0() + big_omega;
        Ok(self.crystal.n_o(w)? * w / C)
    }

    /// Longitudinal wave-vector of the ordinary wave, `√(k(Ω)² − |q|²)`.
    pub fn k_z(&self, qx: f64, qy: f64, big_omega: f64) -> Result<f64> {
        let k = self.k(big_omega)?;
        let q2 = qx * qx + qy * qy;
        if q2 > k * k {
            return Err(Error::Domain(format!(
                "evanescent wave: |q| = {:.6} rad/μm exceeds k = {k:.6} rad/μm",
                q2.sqrt()
            )));
        }
        Ok((k * k - q2).sqrt())
    }

    /// Longitudinal wave-vector of the extraordinary pump at ω_p + Ω, the
    /// positive root of the index-ellipsoid quadratic.
    pub fn k_pz(&self, qx: f64, qy: f64, big_omega: f64) -> Result<f64> {
        let w = self.omega_p + big_omega;
        let no = self.crystal.n_o(w)?;
        let ne = self.crystal.n_e(w)?;
        let nz = self.crystal.n_z(w)?;
        let (s, c) = self.crystal.cut_angle.sin_cos();
        let (no2, ne2, nz2) = (no * no, ne * ne, nz * nz);
        let disc = nz2 * w * w / (C * C) - nz2 * qx * qx / ne2 - nz2 * nz2 * qy * qy / (no2 * ne2);
        if disc < 0.0 {
            return Err(Error::Domain(format!(
                "no propagating pump wave at q = ({qx}, {qy}), Ω = {big_omega}"
            )));
        }
        Ok((nz2 / no2 - nz2 / ne2) * qy * s * c + disc.sqrt())
    }

    /// Relative residual of the pump quadratic relation
    /// `(k² + |q|²)/n_e² + (1/n_o² − 1/n_e²)(k cosθ₀ − q_y sinθ₀)² = ω²/c²`,
    /// the optic-axis orientation for which [`Medium::k_pz`] is the root.
    pub fn pump_relation_residual(&self, qx: f64, qy: f64, big_omega: f64, kpz: f64) -> Result<f64> {
        let w = self.omega_p + big_omega;
        let no = self.crystal.n_o(w)?;
        let ne = self.crystal.n_e(w)?;
        let (s, c) = self.crystal.cut_angle.sin_cos();
        let rhs = w * w / (C * C);
        let t = kpz * c - qy * s;
        let lhs = (kpz * kpz + qx * qx + qy * qy) / (ne * ne) + (1.0 / (no * no) - 1.0 / (ne * ne)) * t * t;
        Ok(((lhs - rhs) / rhs).abs())
    }

    /// Central-difference first and second derivatives of `f` at 0.
    fn derivatives(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<(f64, f64, f64)> {
        let f0 = f(0.0)?;
        let fp = f(h)?;
        let fm = f(-h)?;
        Ok((f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)))
    }

    /// Dispersion coefficients with the step halved from [`DEFAULT_STEP`]
    /// until successive estimates agree to 1e-6 relative.
    pub fn taylor_coefficients(&self) -> Result<DispersionCoeffs> {
        let pump = |w: f64| self.k_pz(0.0, 0.0, w);
        let eval = |h: f64| -> Result<DispersionCoeffs> {
            let (k0, k0p, k0pp) = Self::derivatives(|w| self.k(w), h)?;
            let (kp, kpp, _) = Self::derivatives(pump, h)?;
            Ok(DispersionCoeffs { k0, k0p, k0pp, kp, kpp })
        };
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        let mut h = DEFAULT_STEP;
        let mut prev = eval(h)?;
        for _ in 0..8 {
            h *= 0.5;
            let next = eval(h)?;
            let converged = rel(next.k0p, prev.k0p) < 1e-6
                && rel(next.k0pp, prev.k0pp) < 1e-6
                && rel(next.kpp, prev.kpp) < 1e-6;
            prev = next;
            if converged {
                break;
            }
        }
        Ok(prev)
    }

    /// Richardson-extrapolated second derivative of k(Ω) at 0, used to check
    /// the plain central difference.
    pub fn k0pp_richardson(&self, h: f64) -> Result<f64> {
        let (_, _, d1) = Self::derivatives(|w| self.k(w), h)?;
        let (_, _, d2) = Self::derivatives(|w| self.k(w), 0.5 * h)?;
        Ok((4.0 * d2 - d1) / 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::deg_to_rad;

    pub(crate) fn bbo() -> Medium {
        let crystal = CrystalSpec::new(2000.0, deg_to_rad(29.62), SellmeierSet::bbo_eimerl87()).unwrap();
        Medium::new(crystal, 0.3975).unwrap()
    }

    #[test]
    fn ordinary_index_at_795nm() {
        let s = SellmeierSet::bbo_eimerl87();
        let n = s.n_o(0.795).unwrap();
        assert!((n - 1.661).abs() < 0.005, "n_o = {n}");
        assert!(s.n_o(0.795).unwrap() > s.n_o(0.800).unwrap());
    }

    #[test]
    fn out_of_range_wavelength_is_a_domain_error() {
        let err = SellmeierSet::bbo_eimerl87().n_o(0.010).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Domain(_)));
        assert!(msg.contains("0.22") && msg.contains("1.06"), "{msg}");
    }

    #[test]
    fn negative_uniaxial() {
        let s = SellmeierSet::bbo_eimerl87();
        for lam in [0.25, 0.4, 0.795, 1.0] {
            assert!(s.n_e(lam).unwrap() < s.n_o(lam).unwrap());
        }
    }

    #[test]
    fn crystal_rejects_bad_geometry() {
        let s = SellmeierSet::bbo_eimerl87();
        assert!(matches!(CrystalSpec::new(-1.0, 0.5, s.clone()), Err(Error::Config(_))));
        assert!(matches!(CrystalSpec::new(1.0, 2.0, s), Err(Error::Config(_))));
    }

    #[test]
    fn k_z_values() {
        let m = bbo();
        let k0 = m.k_z(0.0, 0.0, 0.0).unwrap();
        assert!((k0 - 13.13).abs() < 0.01, "k0 = {k0}");
        let k = m.k(0.1).unwrap();
        assert!(m.k_z(k, 0.0, 0.1).unwrap().abs() < 1e-6);
        assert!(matches!(m.k_z(k * 1.01, 0.0, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn k_z_matches_pqda_for_small_arguments() {
        let m = bbo();
        let c = m.taylor_coefficients().unwrap();
        let l = m.length();
        let q0 = (c.k0 / l).sqrt();
        let om0 = (1.0 / (c.k0pp * l)).sqrt();
        let qmax = 0.1 * q0 * (c.k0 * l).sqrt();
        let wmax = 0.1 * om0;
        for i in 0..=10 {
            for j in 0..=10 {
                let qx = -qmax + 2.0 * qmax * i as f64 / 10.0;
                let w = -wmax + 2.0 * wmax * j as f64 / 10.0;
                let exact = m.k_z(qx, 0.0, w).unwrap();
                let pqda = c.k0 + c.k0p * w + 0.5 * c.k0pp * w * w - qx * qx / (2.0 * c.k0);
                assert!(((exact - pqda) / exact).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn pump_on_axis_is_nz_omega_over_c() {
        let m = bbo();
        for w in [-0.3, 0.0, 0.2, 0.5] {
            let kp = m.k_pz(0.0, 0.0, w).unwrap();
            let wp = m.omega_p() + w;
            assert_eq!(kp, m.crystal.n_z(wp).unwrap() * wp / C);
        }
    }

    #[test]
    fn degenerate_matching_angle() {
        let m = bbo();
        let c = m.taylor_coefficients().unwrap();
        let theta_s = (c.kp / (2.0 * c.k0)).acos();
        assert!((crate::units::rad_to_deg(theta_s) - 1.8).abs() < 0.018);
        assert!((m.k_pz(0.0, 0.0, 0.0).unwrap() - 2.0 * c.k0 * theta_s.cos()).abs() < 1e-12);
    }

    #[test]
    fn pump_relation_residual_is_tiny() {
        let m = bbo();
        for (qx, qy, w) in [(0.0, 0.0, 0.0), (0.3, -0.2, 0.1), (-0.05, 0.4, -0.3), (1.0, 1.0, 0.0)] {
            let k = m.k_pz(qx, qy, w).unwrap();
            assert!(m.pump_relation_residual(qx, qy, w, k).unwrap() < 1e-10);
        }
    }

    #[test]
    fn characteristic_widths() {
        let m = bbo();
        let c = m.taylor_coefficients().unwrap();
        let q0 = (c.k0 / m.length()).sqrt();
        let om0 = (1.0 / (c.k0pp * m.length())).sqrt();
        assert!((q0 - 0.08103).abs() / 0.08103 < 1e-3, "Q0 = {q0}");
        assert!((om0 - 0.08298).abs() / 0.08298 < 1e-3, "Ω0 = {om0}");
        let tau = (c.k0p - c.kpp).abs() * m.length() * crate::units::SQRT_2LN2 / std::f64::consts::PI;
        assert!((tau - 141.0).abs() < 1.0, "τ_NPMPA = {tau}");
        assert!(c.k0pp > 0.0);
    }

    #[test]
    fn richardson_agrees_with_central_difference() {
        let m = bbo();
        let c = m.taylor_coefficients().unwrap();
        let r = m.k0pp_richardson(DEFAULT_STEP).unwrap();
        assert!(((r - c.k0pp) / r).abs() < 1e-5);
    }
}
