//! Mode comparison, series structure of singular values, mode classification
//! and spatio-temporal Fourier transforms.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::decomposition::{ModeSet, UnionField};
use crate::gaussian::GaussianModel;
use crate::hermite::hermite_gauss;
use crate::kernel::{Axis, Grid2D};
use crate::linalg;
use crate::par::{self, Execution};
use crate::{Error, Result};

/// |∫ f·g| for two unit modes on the same grid.
pub fn overlap(f: &[f64], g: &[f64], grid_f: &Grid2D, grid_g: &Grid2D) -> Result<f64> {
    if grid_f != grid_g || f.len() != grid_f.len() || g.len() != grid_g.len() {
        return Err(Error::Contract("overlap of modes on different grids".into()));
    }
    Ok(f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>().abs() * grid_f.weight())
}

/// Scale a grid function to unit L² norm.
pub fn normalize(f: &mut [f64], grid: &Grid2D) {
    let n = (f.iter().map(|x| x * x).sum::<f64>() * grid.weight()).sqrt();
    if n > 0.0 {
        f.iter_mut().for_each(|x| *x /= n);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapEntry {
    /// 1-based mode index n.
    pub index: usize,
    pub label: (usize, usize),
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    pub entries: Vec<OverlapEntry>,
    /// Mean over the first six entries (or all, if fewer).
    pub mean_first_six: f64,
}

/// Overlaps of numerical signal modes (0-based `indices`) with the analytic
/// modes of their labels, the latter renormalized on the grid.
pub fn overlap_table(
    modes: &ModeSet,
    model: &GaussianModel,
    indices: &[usize],
    labels: &[(usize, usize)],
) -> Result<OverlapTable> {
    if indices.len() != labels.len() {
        return Err(Error::Contract("one label per mode index is required".into()));
    }
    let mut entries = Vec::with_capacity(indices.len());
    for (&l, &(i, k)) in indices.iter().zip(labels) {
        if l >= modes.len() {
            return Err(Error::Contract(format!("mode {l} not stored (have {})", modes.len())));
        }
        let (mut c, _) = model.analytic_mode(i, k, &modes.grid)?;
        normalize(&mut c, &modes.grid);
        entries.push(OverlapEntry {
            index: l + 1,
            label: (i, k),
            overlap: overlap(&modes.signal_mode(l), &c, &modes.grid, &modes.grid)?,
        });
    }
    let six = entries.len().min(6);
    let mean_first_six = if six == 0 {
        0.0
    } else {
        entries[..six].iter().map(|e| e.overlap).sum::<f64>() / six as f64
    };
    Ok(OverlapTable { entries, mean_first_six })
}

/// Half-width of the slope windows used by [`series_structure`].
pub const BEND_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStructure {
    /// 1-based index of the first value of each new series, ascending.
    pub bends: Vec<usize>,
    /// Number of values in each completed series.
    pub sizes: Vec<usize>,
    /// Slope jump at each bend.
    pub scores: Vec<f64>,
}

impl SeriesStructure {
    pub fn first_bend(&self) -> Option<usize> {
        self.bends.first().copied()
    }
}

fn slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let xm = (n - 1.0) / 2.0;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (v - ym);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Bending points of ln(s_n/s₁): the slope over the `BEND_WINDOW` values
/// starting at a bend exceeds the slope over the preceding window. The
/// largest jump is the first bend; later local maxima of at least a third of
/// it are reported as further bends.
pub fn series_structure(values: &[f64]) -> Result<SeriesStructure> {
    let w = BEND_WINDOW;
    if values.len() < 10 || values.len() < 2 * w + 1 {
        return Err(Error::InsufficientData(format!(
            "series structure needs at least {} values, got {}",
            (2 * w + 1).max(10),
            values.len()
        )));
    }
    // Degenerate runs may be ordered by another key; allow that much slack.
    let slack = crate::decomposition::DEGENERACY_TOL * values[0];
    if values[0] <= 0.0 || values.windows(2).any(|p| p[1] - p[0] > slack) {
        return Err(Error::Contract("singular values must be positive and descending".into()));
    }
    let y: Vec<f64> = values
        .iter()
        .map(|v| (v / values[0]).max(f64::MIN_POSITIVE).ln())
        .collect();
    let n = y.len();
    let score: Vec<f64> = (0..n)
        .map(|b| {
            if b < w || b + w > n {
                f64::NEG_INFINITY
            } else {
                slope(&y[b..b + w]) - slope(&y[b - w..b])
            }
        })
        .collect();
    let first = (w..=n - w).fold(w, |best, b| if score[b] > score[best] { b } else { best });
    let top = score[first];
    let mut bends = vec![first];
    if top > 0.0 {
        let mut b = first + w;
        while b + w <= n {
            let lo = b.saturating_sub(w);
            let hi = (b + w).min(n - w);
            let is_max = (lo..=hi).all(|c| score[c] <= score[b]);
            if is_max && score[b] >= top / 3.0 && b - bends[bends.len() - 1] > w {
                bends.push(b);
            }
            b += 1;
        }
    }
    let scores = bends.iter().map(|&b| score[b]).collect();
    let mut sizes = Vec::with_capacity(bends.len());
    let mut prev = 0;
    for &b in &bends {
        sizes.push(b - prev);
        prev = b;
    }
    Ok(SeriesStructure {
        bends: bends.iter().map(|b| b + 1).collect(),
        sizes,
        scores,
    })
}

/// Rows with norm below this fraction of the largest are ignored, and sign
/// changes are counted only between entries above this fraction of the
/// largest magnitude.
pub const CLASSIFY_THRESHOLD: f64 = 0.05;
/// Lobe-centre rows must exceed this fraction of the strongest row's norm;
/// within them, sign changes count only between entries above this fraction
/// of the row peak.
pub const CLASSIFY_LOBE: f64 = 0.3;

fn sign_changes(v: &[f64], threshold: f64) -> usize {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut n = 0;
    let mut sign = 0.0;
    for &x in v {
        if x.abs() < threshold * max {
            continue;
        }
        if sign != 0.0 && x.signum() != sign {
            n += 1;
        }
        sign = x.signum();
    }
    n
}

/// Row `r` shifted by `d` cells (linear interpolation, zero outside).
fn shifted(r: &[f64], d: f64) -> Vec<f64> {
    let n = r.len();
    (0..n)
        .map(|i| {
            let x = i as f64 - d;
            if x < 0.0 || x > (n - 1) as f64 {
                return 0.0;
            }
            let j = (x.floor() as usize).min(n - 2);
            let t = x - j as f64;
            r[j] * (1.0 - t) + r[j + 1] * t
        })
        .collect()
}

/// Mode order (i, k) by sign-change counting. Each Ω-row is projected onto
/// the strongest row shifted to follow the ridge; k is the number of sign
/// changes of that projection along Ω, so that tilted nodal lines count
/// once. i is the median number of sign changes along q_x over the rows
/// through temporal lobe maxima, which no tilted nodal line crosses.
pub fn classify_mode(f: &[f64], grid: &Grid2D) -> Result<(usize, usize)> {
    if f.len() != grid.len() {
        return Err(Error::Contract("mode length does not match the grid".into()));
    }
    let (nq, nw) = (grid.qx.len, grid.omega.len);
    let rows: Vec<Vec<f64>> = (0..nw).map(|iw| (0..nq).map(|iq| f[grid.index(iq, iw)]).collect()).collect();
    let power: Vec<f64> = rows.iter().map(|r| r.iter().map(|x| x * x).sum()).collect();
    let max = power.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::Contract("cannot classify a zero mode".into()));
    }
    let center = |iw: usize| -> f64 {
        rows[iw].iter().enumerate().map(|(q, x)| q as f64 * x * x).sum::<f64>() / power[iw]
    };
    let strongest = (0..nw).fold(0, |b, iw| if power[iw] > power[b] { iw } else { b });
    let c0 = center(strongest);
    let p: Vec<f64> = (0..nw)
        .map(|iw| {
            if power[iw] < CLASSIFY_THRESHOLD * CLASSIFY_THRESHOLD * max {
                return 0.0;
            }
            let reference = shifted(&rows[strongest], center(iw) - c0);
            reference.iter().zip(&rows[iw]).map(|(a, b)| a * b).sum()
        })
        .collect();
    let peak: Vec<f64> = rows.iter().map(|r| r.iter().fold(0.0_f64, |m, x| m.max(x.abs()))).collect();
    let mut votes: Vec<usize> = (0..nw)
        .filter(|&iw| {
            power[iw] >= CLASSIFY_LOBE * CLASSIFY_LOBE * max
                && (iw == 0 || peak[iw] >= peak[iw - 1])
                && (iw + 1 == nw || peak[iw] >= peak[iw + 1])
        })
        .map(|iw| sign_changes(&rows[iw], CLASSIFY_LOBE))
        .collect();
    votes.sort_unstable();
    let i = votes[(votes.len() - 1) / 2];
    Ok((i, sign_changes(&p, CLASSIFY_THRESHOLD)))
}

/// Classify the first `count` modes.
pub fn classify_modes(modes: &ModeSet, count: usize, exec: Execution) -> Result<Vec<(usize, usize)>> {
    let count = count.min(modes.len());
    par::map_range(exec, count, |l| classify_mode(&modes.signal_mode(l), &modes.grid))
        .into_iter()
        .collect()
}

/// A complex field on a uniform (x [μm], t [fs]) grid, x-major:
/// `index = j·t.len + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatioTemporalMode {
    pub x: Axis,
    pub t: Axis,
    pub field: Vec<Complex64>,
    /// Index of the spectral mode it came from.
    pub parent: usize,
}

impl SpatioTemporalMode {
    pub fn norm_sqr(&self) -> f64 {
        self.field.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.x.step * self.t.step
    }

    pub fn abs(&self) -> Vec<f64> {
        self.field.iter().map(|z| z.norm()).collect()
    }
}

/// Output axes for a spectral grid: Nyquist-sized from the spectral steps,
/// `pad`× more points than the spectral axis, centred on 0.
pub fn spacetime_axes(grid: &Grid2D, pad: usize) -> Result<(Axis, Axis)> {
    if pad == 0 {
        return Err(Error::Contract("zero-padding factor must be at least 1".into()));
    }
    let axis = |a: &Axis| {
        let n = a.len * pad;
        let step = 2.0 * PI / (n as f64 * a.step);
        Axis {
            start: -((n / 2) as f64) * step,
            step,
            len: n,
        }
    };
    Ok((axis(&grid.qx), axis(&grid.omega)))
}

/// F(x,t) = (1/2π)∫ f(q,Ω) e^{i(qx − Ωt)} dq dΩ of one patch whose samples
/// sit at q = q_start + a·h_q (a = 0..n_q) and the grid's Ω axis.
fn transform_patch(
    planner: &mut FftPlanner<f64>,
    values: &[Complex64],
    q_start: f64,
    grid: &Grid2D,
    x: &Axis,
    t: &Axis,
) -> Vec<Complex64> {
    let (nq, nw) = (grid.qx.len, grid.omega.len);
    let (px, pt) = (x.len, t.len);
    let hq = grid.qx.step;
    let hw = grid.omega.step;
    // Sample shifts so that the DFT index runs from the centred axis start.
    let jx = (-x.start / x.step).round() as usize;
    let jt = (-t.start / t.step).round() as usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); px * pt];
    // buf is t-major during the q transform: buf[l·px + j]
    for iw in 0..nw {
        for a in 0..nq {
            let ph = Complex64::from_polar(1.0, -2.0 * PI * (a * jx) as f64 / px as f64);
            buf[iw * px + a] = values[a * nw + iw] * ph;
        }
    }
    let inv = planner.plan_fft_inverse(px);
    for iw in 0..nw {
        inv.process(&mut buf[iw * px..(iw + 1) * px]);
    }
    // transpose to x-major and transform along Ω
    let mut out = vec![Complex64::new(0.0, 0.0); px * pt];
    for j in 0..px {
        for iw in 0..nw {
            let ph = Complex64::from_polar(1.0, 2.0 * PI * (iw * jt) as f64 / pt as f64);
            out[j * pt + iw] = buf[iw * px + j] * ph;
        }
    }
    let fwd = planner.plan_fft_forward(pt);
    for j in 0..px {
        fwd.process(&mut out[j * pt..(j + 1) * pt]);
    }
    let scale = hq * hw / (2.0 * PI);
    let w0 = grid.omega.start;
    for j in 0..px {
        let xj = x.value(j);
        for l in 0..pt {
            let tl = t.value(l);
            out[j * pt + l] *= Complex64::from_polar(scale, q_start * xj - w0 * tl);
        }
    }
    out
}

/// Spatio-temporal form of a signal-side spectral function.
pub fn to_spacetime(f: &[Complex64], grid: &Grid2D, pad: usize, parent: usize) -> Result<SpatioTemporalMode> {
    if f.len() != grid.len() {
        return Err(Error::Contract("mode length does not match the grid".into()));
    }
    let (x, t) = spacetime_axes(grid, pad)?;
    let mut planner = FftPlanner::new();
    let field = transform_patch(&mut planner, f, grid.qx.start, grid, &x, &t);
    Ok(SpatioTemporalMode { x, t, field, parent })
}

/// Spatio-temporal form of a field on signal ∪ mirrored idler grid. Both
/// halves are placed on one q_x lattice spanning [−q_max, q_max], so the
/// grid must be [mirror-aligned](Grid2D::mirror_aligned); the x axis then
/// resolves the signal-idler fringes and Parseval holds for the union.
pub fn union_to_spacetime(u: &UnionField, pad: usize, parent: usize) -> Result<SpatioTemporalMode> {
    let grid = &u.grid;
    if !grid.mirror_aligned() {
        return Err(Error::Contract("union transform needs a mirror-aligned grid".into()));
    }
    let (nq, nw) = (grid.qx.len, grid.omega.len);
    let h = grid.qx.step;
    let m = (2.0 * grid.qx.lo() / h).round() as usize;
    let top = grid.qx.value(nq - 1);
    let union = Grid2D {
        qx: Axis {
            start: -top,
            step: h,
            len: m + 2 * nq,
        },
        omega: grid.omega,
    };
    let mut values = vec![Complex64::new(0.0, 0.0); union.len()];
    for a in 0..nq {
        for iw in 0..nw {
            values[union.index(nq - 1 - a, iw)] = u.idler[grid.index(a, iw)];
            values[union.index(m + nq + a, iw)] = u.signal[grid.index(a, iw)];
        }
    }
    to_spacetime(&values, &union, pad, parent)
}

/// Spatio-temporal transform of the signal Schmidt function C of (i, 0):
/// i^i·h_i(x/u)·Z/√(√π·uτ), Z = e^{iq_d x − (t/τ)²/2a}/√a, a = 1 − 2igx/u.
pub fn closed_form_signal_i0(model: &GaussianModel, i: usize, x: f64, t: f64) -> Result<Complex64> {
    let a = Complex64::new(1.0, -2.0 * model.g * x / model.u);
    let tt = t / model.tau;
    let z = (Complex64::new(0.0, model.q_d * x) - tt * tt / (2.0 * a)).exp() / a.sqrt();
    let ii = Complex64::new(0.0, 1.0).powu(i as u32);
    Ok(ii * z * hermite_gauss(i, x / model.u)? / (PI.sqrt() * model.u * model.tau).sqrt())
}

/// Squeezing mode F⁺_(i,0) = √2·Re(signal closed form).
pub fn closed_form_plus_i0(model: &GaussianModel, i: usize, x: f64, t: f64) -> Result<f64> {
    Ok(std::f64::consts::SQRT_2 * closed_form_signal_i0(model, i, x, t)?.re)
}

/// Fraction of ‖A‖² captured by the best rank-1 approximation, σ₁²/Σσ².
pub fn rank1_fraction(values: &[f64], rows: usize, cols: usize) -> Result<f64> {
    if values.len() != rows * cols {
        return Err(Error::Contract("matrix size mismatch".into()));
    }
    let m = Mat::from_fn(rows, cols, |i, j| values[i * cols + j]);
    let s = linalg::singular_values(m.as_ref())?;
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return Err(Error::Contract("rank-1 fraction of a zero matrix".into()));
    }
    Ok(s[0] * s[0] / total)
}

/// Ridge geometry of a spectral mode of temporal order k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeDeflection {
    /// Ridge curvature β in q_ridge(Ω) = q_c + βΩ² [μm⁻¹·fs²].
    pub curvature: f64,
    pub q_center: f64,
    /// Δq = βΩ_e² at the edge frequency Ω_e = √(4k+3)/τ.
    pub deflection: f64,
    /// δq = 2√2·σ_q, the pooled RMS width across the ridge times 2√2.
    pub width: f64,
    /// Δq/δq; (2k + 3/2)g in the Gaussian model.
    pub ratio: f64,
}

/// Fit the ridge of |f|² along q_x as a parabola in Ω and compare its
/// deflection at the edge of temporal order `k` with its width.
pub fn ridge_deflection(f: &[f64], grid: &Grid2D, k: usize, tau: f64) -> Result<RidgeDeflection> {
    if f.len() != grid.len() {
        return Err(Error::Contract("mode length does not match the grid".into()));
    }
    let (nq, nw) = (grid.qx.len, grid.omega.len);
    let q = grid.qx.values();
    let mut rows = Vec::new();
    let mut max_w = 0.0_f64;
    for iw in 0..nw {
        let w: f64 = (0..nq).map(|iq| f[grid.index(iq, iw)].powi(2)).sum();
        max_w = max_w.max(w);
        rows.push(w);
    }
    // Weighted LSQ of q_mean(Ω) against (1, Ω²) over significant rows.
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut means = vec![0.0; nw];
    for iw in 0..nw {
        if rows[iw] < 1e-3 * max_w {
            continue;
        }
        let m: f64 = (0..nq).map(|iq| q[iq] * f[grid.index(iq, iw)].powi(2)).sum::<f64>() / rows[iw];
        means[iw] = m;
        let o2 = grid.omega.value(iw).powi(2);
        let wt = rows[iw];
        s0 += wt;
        s1 += wt * o2;
        s2 += wt * o2 * o2;
        t0 += wt * m;
        t1 += wt * m * o2;
    }
    let det = s0 * s2 - s1 * s1;
    if det <= 0.0 {
        return Err(Error::InsufficientData("too few significant rows to fit the ridge".into()));
    }
    let curvature = (s0 * t1 - s1 * t0) / det;
    let q_center = (s2 * t0 - s1 * t1) / det;
    let (mut var, mut tot) = (0.0, 0.0);
    for iw in 0..nw {
        if rows[iw] < 1e-3 * max_w {
            continue;
        }
        for iq in 0..nq {
            let p = f[grid.index(iq, iw)].powi(2);
            var += p * (q[iq] - means[iw]).powi(2);
            tot += p;
        }
    }
    let width = 2.0 * std::f64::consts::SQRT_2 * (var / tot).sqrt();
    let deflection = curvature * (4 * k + 3) as f64 / (tau * tau);
    Ok(RidgeDeflection {
        curvature,
        q_center,
        deflection,
        width,
        ratio: deflection / width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{CrystalSpec, Medium, SellmeierSet};
    use crate::gaussian::model_params;
    use crate::kernel::{FilterSpec, PumpSpec};
    use crate::phasematch::PqdaParams;
    use crate::units::deg_to_rad;
    use proptest::prelude::*;

    fn long_model() -> (GaussianModel, FilterSpec) {
        let crystal = CrystalSpec::new(2000.0, deg_to_rad(29.62), SellmeierSet::bbo_eimerl87()).unwrap();
        let m = Medium::new(crystal, 0.3975).unwrap();
        let p = PqdaParams::new(&m).unwrap();
        let pump = PumpSpec::new(0.3975, 280.0, 100.0).unwrap();
        let f = FilterSpec::mirror_rule(&p, pump.q_sigma()).unwrap();
        (model_params(&p, &pump, &f, 2.6721).unwrap(), f)
    }

    fn cplx(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn overlap_of_unit_mode_with_itself() {
        let (m, f) = long_model();
        let grid = Grid2D::tiling(&f, 32, 96, 0.0).unwrap();
        let (mut c, _) = m.analytic_mode(0, 2, &grid).unwrap();
        normalize(&mut c, &grid);
        assert!((overlap(&c, &c, &grid, &grid).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = c.iter().map(|x| -x).collect();
        assert!((overlap(&c, &neg, &grid, &grid).unwrap() - 1.0).abs() < 1e-12);
        let other = grid.refined(2);
        assert!(matches!(overlap(&c, &c, &grid, &other), Err(Error::Contract(_))));
    }

    #[test]
    fn series_needs_ten_values() {
        assert!(matches!(series_structure(&[1.0; 9]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn series_of_analytic_spectrum() {
        let (m, _) = long_model();
        let spec: Vec<f64> = m.spectrum(300).iter().map(|s| s.0).collect();
        let s = series_structure(&spec).unwrap();
        let r = crate::gaussian::schmidt_numbers(&m);
        let first = s.first_bend().unwrap();
        assert!((first as i64 - r.first_spatial_index as i64).abs() <= 1, "{first}");
        assert!((first as f64 - r.series_length.round()).abs() <= 2.0);
        assert_eq!(s.sizes[0], first - 1);
        assert!(s.bends.len() >= 2, "{:?}", s.bends);
    }

    #[test]
    fn series_of_two_slopes() {
        let v: Vec<f64> = (0..60).map(|n| if n < 30 { -0.2 * n as f64 } else { -6.0 - 0.05 * (n - 30) as f64 }.exp()).collect();
        let s = series_structure(&v).unwrap();
        assert_eq!(s.first_bend(), Some(31));
    }

    #[test]
    fn classification_of_analytic_modes() {
        let (m, f) = long_model();
        let grid = Grid2D::tiling(&f, 32, 96, 0.0).unwrap();
        for (i, k) in [(0, 0), (0, 1), (0, 4), (1, 0), (1, 3), (2, 1), (0, 9)] {
            let (c, _) = m.analytic_mode(i, k, &grid).unwrap();
            assert_eq!(classify_mode(&c, &grid).unwrap(), (i, k));
            let neg: Vec<f64> = c.iter().map(|x| -x).collect();
            assert_eq!(classify_mode(&neg, &grid).unwrap(), (i, k));
        }
    }

    #[test]
    fn parseval_for_unit_modes() {
        let (m, f) = long_model();
        let grid = Grid2D::tiling(&f, 32, 96, 0.0).unwrap();
        for (i, k) in [(0, 0), (1, 3)] {
            let (mut c, _) = m.analytic_mode(i, k, &grid).unwrap();
            normalize(&mut c, &grid);
            for pad in [1, 2, 3] {
                let st = to_spacetime(&cplx(&c), &grid, pad, 0).unwrap();
                assert!((st.norm_sqr() - 1.0).abs() < 1e-6, "pad {pad}: {}", st.norm_sqr());
            }
        }
        assert!(to_spacetime(&cplx(&[1.0; 3]), &grid, 2, 0).is_err());
    }

    #[test]
    fn parseval_for_union_modes() {
        let (m, f) = long_model();
        let grid = Grid2D::tiling(&f, 32, 96, 0.0).unwrap();
        for (i, k) in [(0, 0), (0, 1), (1, 2)] {
            let (mut c, _) = m.analytic_mode(i, k, &grid).unwrap();
            normalize(&mut c, &grid);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let d: Vec<f64> = c.iter().map(|x| sign * x).collect();
            let (plus, minus) = crate::decomposition::squeezing_modes(&grid, &c, &d).unwrap();
            for u in [&plus, &minus] {
                let st = union_to_spacetime(u, 2, 0).unwrap();
                assert!((st.norm_sqr() - 1.0).abs() < 1e-6, "({i},{k}): {}", st.norm_sqr());
            }
        }
        let skewed = Grid2D::new(0.3001, 0.5, 0.2, 6, 8).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); skewed.len()];
        let u = UnionField { grid: skewed, signal: z.clone(), idler: z };
        assert!(matches!(union_to_spacetime(&u, 2, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn transform_matches_direct_sum() {
        let grid = Grid2D::new(0.3, 0.5, 0.2, 6, 8).unwrap();
        let f: Vec<Complex64> = (0..grid.len()).map(|a| Complex64::new((a as f64 * 0.37).sin(), (a as f64 * 0.11).cos())).collect();
        let st = to_spacetime(&f, &grid, 2, 0).unwrap();
        for &(j, l) in &[(0usize, 0usize), (3, 7), (11, 15), (6, 8)] {
            let (x, t) = (st.x.value(j), st.t.value(l));
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..grid.len() {
                let (q, w) = grid.point(a);
                s += f[a] * Complex64::from_polar(1.0, q * x - w * t);
            }
            s *= grid.weight() / (2.0 * PI);
            assert!((st.field[j * st.t.len + l] - s).norm() < 1e-12, "({j},{l})");
        }
    }

    #[test]
    fn analytic_plus_mode_matches_closed_form() {
        let (m, f) = long_model();
        let grid = Grid2D::tiling(&f, 64, 192, 0.0).unwrap();
        for i in 0..3 {
            let (c, d) = m.analytic_mode(i, 0, &grid).unwrap();
            let (plus, _) = crate::decomposition::squeezing_modes(&grid, &c, &d).unwrap();
            let st = union_to_spacetime(&plus, 2, 0).unwrap();
            let mut worst = 0.0_f64;
            let mut peak = 0.0_f64;
            for j in 0..st.x.len {
                for l in 0..st.t.len {
                    let cf = closed_form_plus_i0(&m, i, st.x.value(j), st.t.value(l)).unwrap();
                    peak = peak.max(cf.abs());
                    let z = st.field[j * st.t.len + l];
                    worst = worst.max((z.re - cf).abs()).max(z.im.abs());
                }
            }
            // Both fields have unit norm; the residual comes from the filter
            // edge clipping the spectral tail.
            assert!(worst < 1e-3, "i = {i}: {worst}");
            assert!(worst / peak < 2e-3, "i = {i}: {worst} / {peak}");
        }
    }

    #[test]
    fn zero_coupling_is_separable() {
        let (mut m, f) = long_model();
        m.g = 0.0;
        let grid = Grid2D::tiling(&f, 32, 96, 0.0).unwrap();
        let (c, _) = m.analytic_mode(0, 3, &grid).unwrap();
        let st = to_spacetime(&cplx(&c), &grid, 1, 0).unwrap();
        let frac = rank1_fraction(&st.abs(), st.x.len, st.t.len).unwrap();
        assert!(frac > 0.999, "{frac}");
    }

    #[test]
    fn coupled_mode_is_not_separable() {
        let (m, f) = long_model();
        let grid = Grid2D::tiling(&f, 32, 96, 0.0).unwrap();
        let (c, d) = m.analytic_mode(0, 3, &grid).unwrap();
        let (plus, _) = crate::decomposition::squeezing_modes(&grid, &c, &d).unwrap();
        let st = union_to_spacetime(&plus, 1, 0).unwrap();
        assert!(rank1_fraction(&st.abs(), st.x.len, st.t.len).unwrap() < 0.99);
    }

    #[test]
    fn ridge_of_analytic_modes() {
        let (m, f) = long_model();
        let grid = Grid2D::tiling(&f, 64, 192, 0.0).unwrap();
        for k in 1..=3 {
            let (c, _) = m.analytic_mode(0, k, &grid).unwrap();
            let r = ridge_deflection(&c, &grid, k, m.tau).unwrap();
            let expect = (2.0 * k as f64 + 1.5) * m.g;
            assert!((r.ratio - expect).abs() / expect < 0.05, "k = {k}: {} vs {expect}", r.ratio);
            assert!((r.curvature - m.g * m.tau * m.tau / m.u).abs() / r.curvature < 0.02);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn overlap_is_bounded_and_sign_invariant(seed in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let grid = Grid2D::new(0.1, 0.2, 1.0, 3, 4).unwrap();
            let mut a = seed.clone();
            let mut b: Vec<f64> = seed.iter().rev().map(|x| x * 0.5 + 0.1).collect();
            normalize(&mut a, &grid);
            normalize(&mut b, &grid);
            let o = overlap(&a, &b, &grid, &grid).unwrap();
            prop_assert!(o <= 1.0 + 1e-8);
            let nb: Vec<f64> = b.iter().map(|x| -x).collect();
            prop_assert!((overlap(&a, &nb, &grid, &grid).unwrap() - o).abs() < 1e-15);
        }
    }
}
