//! Analytic Gaussian model of the filtered JSA in curvilinear coordinates:
//! Mehler decomposition, ξ-parameters, Schmidt modes and numbers, coupling
//! constant, rounding thresholds and the fit of the filter parameter μ.

use std::f64::consts::{E, PI, SQRT_2};

use crate::decomposition::ModeSet;
use crate::hermite::hermite_gauss;
use crate::kernel::{FilterSpec, Grid2D, PumpSpec};
use crate::par::{self, Execution};
use crate::phasematch::{PqdaParams, SIGMA_S};
use crate::{Error, Result};

/// Parameters of the analytic model for one pump and one value of μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    pub mu: f64,
    pub r_x: f64,
    pub r_t: f64,
    pub r_y: f64,
    pub xi_x: f64,
    pub xi_t: f64,
    /// `None` when r_y ≤ 1 (the y dimension is then strictly single-mode).
    pub xi_y: Option<f64>,
    /// u = (η_s q_p)^{−1/2} [μm]
    pub u: f64,
    /// v = (μ q_y,max q_p)^{−1/2} [μm]
    pub v: f64,
    /// τ = (μ Ω_max Ω_p)^{−1/2} [fs]
    pub tau: f64,
    /// g = uQ₀²/(2τ²Ω₀²q_d)
    pub g: f64,
    /// 2D normalization 𝒩 = πA₀√((1−ξ_x²)(1−ξ_t²))/(uτ)
    pub norm: f64,
    pub q_d: f64,
}

fn xi_of(r: f64) -> f64 {
    (r - 1.0) / (r + 1.0)
}

/// Model for filter parameter μ.
pub fn model_params(pqda: &PqdaParams, pump: &PumpSpec, filter: &FilterSpec, mu: f64) -> Result<GaussianModel> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Domain(format!("μ must be positive, got {mu}")));
    }
    let qp = pump.q_sigma();
    let wp = pump.omega_sigma();
    let r_x = pqda.eta_s / qp;
    let r_t = mu * filter.omega_max / wp;
    let r_y = mu * filter.qy_max / qp;
    if r_x <= 1.0 {
        return Err(Error::ModelInapplicable(format!(
            "r_x = η_s/q_p = {r_x:.4} ≤ 1: pump waist below the walk-off width"
        )));
    }
    if r_t <= 1.0 {
        return Err(Error::ModelInapplicable(format!(
            "r_t = μΩ_max/Ω_p = {r_t:.4} ≤ 1: pump bandwidth exceeds the filtered band"
        )));
    }
    let xi_x = xi_of(r_x);
    let xi_t = xi_of(r_t);
    let u = 1.0 / (pqda.eta_s * qp).sqrt();
    let tau = 1.0 / (mu * filter.omega_max * wp).sqrt();
    let v = 1.0 / (mu * filter.qy_max * qp).sqrt();
    let g = u * pqda.big_q0 * pqda.big_q0 / (2.0 * tau * tau * pqda.big_omega0 * pqda.big_omega0 * pqda.q_d);
    let norm = PI * pump.amplitude * ((1.0 - xi_x * xi_x) * (1.0 - xi_t * xi_t)).sqrt() / (u * tau);
    Ok(GaussianModel {
        mu,
        r_x,
        r_t,
        r_y,
        xi_x,
        xi_t,
        xi_y: (r_y > 1.0).then(|| xi_of(r_y)),
        u,
        v,
        tau,
        g,
        norm,
        q_d: pqda.q_d,
    })
}

/// N₀ = π√(ln2/(2^{3/2}σ_s)) ≈ 1.23.
pub fn coupling_prefactor() -> f64 {
    PI * (2f64.ln() / (2f64.powf(1.5) * SIGMA_S)).sqrt()
}

/// g in experimental parameters, N₀k₀″μ√(w_pL)Ω_max/(πτ_p√sinθ_s).
pub fn coupling_experimental(pqda: &PqdaParams, pump: &PumpSpec, omega_max: f64, mu: f64) -> f64 {
    coupling_prefactor() * pqda.coeffs.k0pp * mu * (pump.waist * pqda.length).sqrt() * omega_max
        / (PI * pump.duration * pqda.theta_s.sin().sqrt())
}

impl GaussianModel {
    /// Signal Schmidt mode C_(i,k) at signal point (q_x, Ω).
    pub fn signal_value(&self, i: usize, k: usize, qx: f64, omega: f64) -> Result<f64> {
        let t = self.tau * omega;
        let x = self.u * (qx - self.q_d) - self.g * t * t;
        Ok(hermite_gauss(i, x)? * hermite_gauss(k, t)? * (self.u * self.tau).sqrt())
    }

    /// `(C, D)` of mode (i, k) on the grid; D is given at the mirrored
    /// points (−q_x, Ω) where it equals (−1)^k·C.
    pub fn analytic_mode(&self, i: usize, k: usize, grid: &Grid2D) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut c = Vec::with_capacity(grid.len());
        for a in 0..grid.len() {
            let (q, w) = grid.point(a);
            c.push(self.signal_value(i, k, q, w)?);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let d = c.iter().map(|x| sign * x).collect();
        Ok((c, d))
    }

    /// The largest `count` analytic values 𝒩ξ_x^iξ_t^k with their labels.
    pub fn spectrum(&self, count: usize) -> Vec<(f64, usize, usize)> {
        let mut out = Vec::new();
        let ln_x = self.xi_x.ln();
        let ln_t = self.xi_t.ln();
        // Enough terms in each direction to contain the top `count`.
        for i in 0..=count {
            for k in 0..=count {
                out.push((i as f64 * ln_x + k as f64 * ln_t, i, k));
                if (k as f64) * ln_t < (count as f64) * ln_t.min(ln_x) {
                    break;
                }
            }
            if (i as f64) * ln_x < (count as f64) * ln_t.min(ln_x) {
                break;
            }
        }
        out.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        out.truncate(count);
        out.into_iter().map(|(l, i, k)| (self.norm * l.exp(), i, k)).collect()
    }
}

/// Mehler singular values √(1−ξ²)ξⁿ, n = 0..=n_max.
pub fn mehler_singular_values(xi: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::Domain(format!("ξ must lie in [0, 1), got {xi}")));
    }
    let a = (1.0 - xi * xi).sqrt();
    Ok((0..=n_max).map(|n| a * xi.powi(n as i32)).collect())
}

/// Double-Gaussian kernel π^{−1/2}exp(−(x−y)²/4r − r(x+y)²/4) with
/// r = (1+ξ)/(1−ξ), whose SVD is Σ√(1−ξ²)ξⁿ h_n(x)·(−1)ⁿh_n(y).
pub fn double_gaussian(xi: f64, x: f64, y: f64) -> f64 {
    let r = (1.0 + xi) / (1.0 - xi);
    let d = x - y;
    let s = x + y;
    (-d * d / (4.0 * r) - r * s * s / 4.0).exp() / PI.sqrt()
}

/// Products 𝒩·Πξ_a^{n_a} over all index tuples, largest `count`, descending.
pub fn composite_values(norm: f64, xis: &[f64], count: usize) -> Vec<f64> {
    let mut vals = vec![0.0_f64];
    for &xi in xis {
        let ln = if xi > 0.0 { xi.ln() } else { f64::NEG_INFINITY };
        let mut next = Vec::new();
        for &v in &vals {
            for n in 0..=count {
                next.push(v + n as f64 * ln);
                if !ln.is_finite() {
                    break;
                }
            }
        }
        next.sort_by(|a, b| b.total_cmp(a));
        next.truncate(count);
        vals = next;
    }
    vals.into_iter().map(|l| norm * l.exp()).collect()
}

/// K_a = (1+ξ²)/(1−ξ²).
pub fn schmidt_number_1d(xi: f64) -> f64 {
    (1.0 + xi * xi) / (1.0 - xi * xi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtReport {
    pub k_x: f64,
    pub k_t: f64,
    /// Informational; the y dimension is not part of the 2D product.
    pub k_y: Option<f64>,
    /// K = K_x·K_t
    pub k: f64,
    pub k0: f64,
    pub k0_prime: f64,
    /// M = ln ξ_x / ln ξ_t
    pub series_length: f64,
    /// 1-based index of the first i = 1 value: ⌊M⌋ + 2, after the
    /// ⌊M⌋ + 1 values ξ_t^k of the first series.
    pub first_spatial_index: usize,
    pub disregarded: DisregardedValues,
}

pub fn schmidt_numbers(model: &GaussianModel) -> SchmidtReport {
    let k_x = schmidt_number_1d(model.xi_x);
    let k_t = schmidt_number_1d(model.xi_t);
    let (k0, k0_prime) = rounding_thresholds();
    let m = model.xi_x.ln() / model.xi_t.ln();
    SchmidtReport {
        k_x,
        k_t,
        k_y: model.xi_y.map(schmidt_number_1d),
        k: k_x * k_t,
        k0,
        k0_prime,
        series_length: m,
        first_spatial_index: m.floor() as usize + 2,
        disregarded: disregarded_values(k_x * k_t, k_x),
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// (K₀, K₀′): roots of e^{−K} = √((K−1)/(K+1)) and
/// e^{−√(2K)} = √((K−1)/(K+1)) on (1, 3).
pub fn rounding_thresholds() -> (f64, f64) {
    let g = |k: f64| ((k - 1.0) / (k + 1.0)).sqrt();
    let k0 = bisect(|k| (-k).exp() - g(k), 1.0, 3.0);
    let k0p = bisect(|k| (-(2.0 * k).sqrt()).exp() - g(k), 1.0, 3.0);
    (k0, k0p)
}

/// ξ at which a dimension's Schmidt number equals K.
pub fn xi_for_schmidt_number(k: f64) -> f64 {
    ((k - 1.0) / (k + 1.0)).sqrt()
}

/// First disregarded singular values relative to 𝒩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisregardedValues {
    /// ((K−1)/(K+1))^{K/2}
    pub one_d: f64,
    /// e^{−1}
    pub one_d_limit: f64,
    /// ξ_x^{√2K_x}
    pub two_d: f64,
    /// e^{−√2}
    pub two_d_limit: f64,
}

pub fn disregarded_values(k: f64, k_x: f64) -> DisregardedValues {
    DisregardedValues {
        one_d: ((k - 1.0) / (k + 1.0)).powf(0.5 * k),
        one_d_limit: 1.0 / E,
        two_d: xi_for_schmidt_number(k_x).powf(SQRT_2 * k_x),
        two_d_limit: (-SQRT_2).exp(),
    }
}

/// μ giving the series length M (from ln ξ_t = ln ξ_x / M).
pub fn mu_for_series_length(pqda: &PqdaParams, pump: &PumpSpec, filter: &FilterSpec, m: f64) -> Result<f64> {
    let r_x = pqda.eta_s / pump.q_sigma();
    if r_x <= 1.0 || !(m > 0.0) {
        return Err(Error::ModelInapplicable(format!("no μ for series length {m} (r_x = {r_x})")));
    }
    let xi_t = (xi_of(r_x).ln() / m).exp();
    let r_t = (1.0 + xi_t) / (1.0 - xi_t);
    Ok(r_t * pump.omega_sigma() / filter.omega_max)
}

/// Bracket for the μ fit.
pub const MU_RANGE: (f64, f64) = (0.3, 5.0);

#[derive(Debug, Clone, PartialEq)]
pub struct MuFit {
    pub mu: f64,
    pub mean_overlap: f64,
    pub at_boundary: bool,
    pub warning: Option<String>,
    /// Coarse scan (μ, mean overlap).
    pub scan: Vec<(f64, f64)>,
}

/// |⟨a, b⟩| / (‖a‖‖b‖) for real grid functions.
pub(crate) fn normalized_overlap(a: &[f64], b: &[f64]) -> f64 {
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        ab.abs() / (aa * bb).sqrt()
    }
}

/// Mean overlap of numerical signal modes with the analytic modes of the
/// given labels, for one μ.
pub fn mean_overlap(
    modes: &ModeSet,
    labels: &[(usize, usize)],
    pqda: &PqdaParams,
    pump: &PumpSpec,
    filter: &FilterSpec,
    mu: f64,
) -> Result<f64> {
    let model = model_params(pqda, pump, filter, mu)?;
    let mut sum = 0.0;
    for (l, &(i, k)) in labels.iter().enumerate() {
        let (c, _) = model.analytic_mode(i, k, &modes.grid)?;
        sum += normalized_overlap(&modes.signal_mode(l), &c);
    }
    Ok(sum / labels.len() as f64)
}

/// Maximize the mean overlap of the first `labels.len()` numerical modes
/// over μ ∈ [`MU_RANGE`]: scan at Δμ = 0.05 then golden-section refine to
/// Δμ < 1e-3.
pub fn fit_mu(
    modes: &ModeSet,
    labels: &[(usize, usize)],
    pqda: &PqdaParams,
    pump: &PumpSpec,
    filter: &FilterSpec,
    exec: Execution,
) -> Result<MuFit> {
    if labels.is_empty() || labels.len() > modes.len() {
        return Err(Error::InsufficientData(format!(
            "μ fit needs 1..={} labelled modes, got {}",
            modes.len(),
            labels.len()
        )));
    }
    let (lo, hi) = MU_RANGE;
    let step = 0.05;
    let n = ((hi - lo) / step).round() as usize + 1;
    let objective = |mu: f64| mean_overlap(modes, labels, pqda, pump, filter, mu).unwrap_or(0.0);
    let scan: Vec<(f64, f64)> = par::map_range(exec, n, |i| {
        let mu = lo + step * i as f64;
        (mu, objective(mu))
    });
    let best = scan
        .iter()
        .enumerate()
        .fold(0, |b, (i, s)| if s.1 > scan[b].1 { i } else { b });
    if best == 0 || best == n - 1 {
        let (mu, ov) = scan[best];
        return Ok(MuFit {
            mu,
            mean_overlap: ov,
            at_boundary: true,
            warning: Some(format!("no interior maximum of the mean overlap in μ ∈ [{lo}, {hi}]; reporting the boundary")),
            scan,
        });
    }
    let (mut a, mut b) = (scan[best - 1].0, scan[best + 1].0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while b - a > 1e-4 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = objective(x2);
        }
    }
    let mu = 0.5 * (a + b);
    Ok(MuFit {
        mu,
        mean_overlap: objective(mu),
        at_boundary: false,
        warning: None,
        scan,
    })
}
