//! Pump amplitude, filtered joint spectral amplitude and its discretization
//! on the (q_x, Ω) plane at q_y = 0.
//!
//! The kernel is stored in relative (mirror) coordinates: row `a` is the
//! signal point `(q_a, Ω_a)` of the grid and column `b` is the idler point
//! `(−q_b, Ω_b)`. With this pairing the type-I kernel is an exactly symmetric
//! matrix.

use faer::Mat;

use crate::dispersion::Medium;
use crate::par::{self, Execution};
use crate::phasematch::PqdaParams;
use crate::units::{sinc, SQRT_2LN2};
use crate::{Error, Result};

/// Transform-limited Gaussian pump focused at the crystal center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    /// λ_p [μm]
    pub wavelength: f64,
    /// Intensity FWHM τ_p [fs]
    pub duration: f64,
    /// Waist w_p [μm]
    pub waist: f64,
    /// Peak amplitude A₀ (arbitrary units)
    pub amplitude: f64,
}

impl PumpSpec {
    pub fn new(wavelength: f64, duration: f64, waist: f64) -> Result<Self> {
        Self::with_amplitude(wavelength, duration, waist, 1.0)
    }

    pub fn with_amplitude(wavelength: f64, duration: f64, waist: f64, amplitude: f64) -> Result<Self> {
        for (name, v) in [("wavelength", wavelength), ("duration", duration), ("waist", waist)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("pump {name} must be positive, got {v}")));
            }
        }
        if !amplitude.is_finite() {
            return Err(Error::Config("pump amplitude must be finite".into()));
        }
        Ok(Self {
            wavelength,
            duration,
            waist,
            amplitude,
        })
    }

    /// Ω_p = √(2ln2)/τ_p [rad/fs]
    pub fn omega_sigma(&self) -> f64 {
        SQRT_2LN2 / self.duration
    }

    /// q_p = 1/w_p [rad/μm]
    pub fn q_sigma(&self) -> f64 {
        1.0 / self.waist
    }

    /// A_p at summed transverse wave-vector and summed frequency offset.
    pub fn amplitude_at(&self, qx_sum: f64, qy_sum: f64, omega_sum: f64) -> f64 {
        let qp = self.q_sigma();
        let wp = self.omega_sigma();
        let q2 = qx_sum * qx_sum + qy_sum * qy_sum;
        self.amplitude * (-q2 / (4.0 * qp * qp) - omega_sum * omega_sum / (4.0 * wp * wp)).exp()
    }
}

/// Mirrors selecting signal (q_x > 0) and idler (q_x < 0) beams, plus the
/// frequency cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// [rad/μm]
    pub qx_min: f64,
    /// [rad/μm]
    pub qx_max: f64,
    /// [rad/μm]
    pub qy_max: f64,
    /// [rad/fs]
    pub omega_max: f64,
}

impl FilterSpec {
    pub fn new(qx_min: f64, qx_max: f64, qy_max: f64, omega_max: f64) -> Result<Self> {
        if !(qx_min > 0.0) {
            return Err(Error::Config(format!("filter qx_min must be positive, got {qx_min}")));
        }
        if !(qx_min < qx_max) {
            return Err(Error::Config(format!(
                "filter qx_min ({qx_min}) must be below filter qx_max ({qx_max})"
            )));
        }
        if !(qy_max > 0.0) {
            return Err(Error::Config(format!("filter qy_max must be positive, got {qy_max}")));
        }
        if !(omega_max > 0.0) {
            return Err(Error::Config(format!("filter omega_max must be positive, got {omega_max}")));
        }
        Ok(Self {
            qx_min,
            qx_max,
            qy_max,
            omega_max,
        })
    }

    /// q_x ∈ [q_d − 2η_s, q_d + 2Q₀], Ω_max = Ω^(pm)(q_x,max).
    pub fn mirror_rule(pqda: &PqdaParams, qy_max: f64) -> Result<Self> {
        Self::new(
            pqda.qx_min_rule(),
            pqda.qx_max_rule(),
            qy_max,
            pqda.omega_pm(pqda.qx_max_rule())?,
        )
    }

    /// Π(q_x)Π₀(Ω) for a signal-side point.
    pub fn passes(&self, qx: f64, omega: f64) -> bool {
        qx >= self.qx_min && qx <= self.qx_max && omega.abs() <= self.omega_max
    }
}

/// Uniform axis of cell midpoints: `value(i) = start + i·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    /// `n` midpoints tiling `[lo, hi]`.
    pub fn midpoints(lo: f64, hi: f64, n: usize) -> Self {
        let step = (hi - lo) / n as f64;
        Self {
            start: lo + 0.5 * step,
            step,
            len: n,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    /// Lower cell edge.
    pub fn lo(&self) -> f64 {
        self.start - 0.5 * self.step
    }

    /// Upper cell edge.
    pub fn hi(&self) -> f64 {
        self.start + (self.len as f64 - 0.5) * self.step
    }
}

/// Discretization of the signal half-plane; the idler grid is its mirror
/// image q_x → −q_x. Points are ordered with Ω fastest:
/// `index = i_q·N_Ω + i_Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub qx: Axis,
    pub omega: Axis,
}

impl Grid2D {
    /// Grid over `[qx_lo, qx_hi] × [−omega_hi, omega_hi]`.
    pub fn new(qx_lo: f64, qx_hi: f64, omega_hi: f64, n_q: usize, n_omega: usize) -> Result<Self> {
        if n_q < 2 || n_omega < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points per axis, got {n_q}x{n_omega}"
            )));
        }
        if !(qx_lo > 0.0 && qx_lo < qx_hi) {
            return Err(Error::Config(format!(
                "grid q_x range [{qx_lo}, {qx_hi}] must be positive and increasing"
            )));
        }
        if !(omega_hi > 0.0) {
            return Err(Error::Config(format!("grid Ω extent must be positive, got {omega_hi}")));
        }
        Ok(Self {
            qx: Axis::midpoints(qx_lo, qx_hi, n_q),
            omega: Axis::midpoints(-omega_hi, omega_hi, n_omega),
        })
    }

    /// Grid tiling the filter rectangle enlarged by `margin` (fraction of
    /// the q_x width and of Ω_max on each side). The lower q_x edge is then
    /// lowered by less than half a cell so that the grid is
    /// [mirror-aligned](Self::mirror_aligned); an edge within half a cell of
    /// q_x = 0 is left as is.
    pub fn tiling(filter: &FilterSpec, n_q: usize, n_omega: usize, margin: f64) -> Result<Self> {
        if !(margin >= 0.0) {
            return Err(Error::Config(format!("grid margin must be non-negative, got {margin}")));
        }
        let dq = margin * (filter.qx_max - filter.qx_min);
        let (lo, hi) = (filter.qx_min - dq, filter.qx_max + dq);
        // lo' = m·h/2 with h = (hi − lo')/n_q, largest integer m with lo' ≤ lo
        let n = 2.0 * n_q as f64;
        let m = (n * lo / (hi - lo) + 1e-9).floor();
        let lo = if m >= 1.0 { m * hi / (n + m) } else { lo };
        Self::new(lo, hi, filter.omega_max * (1.0 + margin), n_q, n_omega)
    }

    /// Whether the mirror points −q_x lie on the q_x lattice, i.e. the lower
    /// edge is a whole number of half cells. Signal and idler fields then
    /// share one discrete transform.
    pub fn mirror_aligned(&self) -> bool {
        let m = 2.0 * self.qx.lo() / self.qx.step;
        (m - m.round()).abs() < 1e-6
    }

    pub fn len(&self) -> usize {
        self.qx.len * self.omega.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, iq: usize, iw: usize) -> usize {
        iq * self.omega.len + iw
    }

    /// Signal-side `(q_x, Ω)` of point `a`.
    pub fn point(&self, a: usize) -> (f64, f64) {
        (self.qx.value(a / self.omega.len), self.omega.value(a % self.omega.len))
    }

    /// Quadrature weight h_q·h_Ω (uniform).
    pub fn weight(&self) -> f64 {
        self.qx.step * self.omega.step
    }

    /// Whether the grid cells cover the filter's pass region.
    pub fn covers(&self, filter: &FilterSpec) -> bool {
        let eps = 1e-12;
        self.qx.lo() <= filter.qx_min + eps
            && self.qx.hi() >= filter.qx_max - eps
            && self.omega.hi() >= filter.omega_max - eps
    }

    /// Same extents, `factor`× more points per axis; preserves mirror
    /// alignment.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            qx: Axis::midpoints(self.qx.lo(), self.qx.hi(), self.qx.len * factor),
            omega: Axis::midpoints(self.omega.lo(), self.omega.hi(), self.omega.len * factor),
        }
    }
}

/// Dense kernel in relative coordinates.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub data: Mat<f64>,
    pub grid: Grid2D,
    pub weighted: bool,
}

/// Everything needed to evaluate one kernel entry in O(1): per-point k_z and
/// filter mask, plus pump factor and k_pz tabulated on the lattice of
/// (|i_a − i_b|, j_a + j_b) index pairs.
struct Lattice {
    n_omega: usize,
    half_length: f64,
    kz: Vec<f64>,
    inside: Vec<bool>,
    pump: Vec<f64>,
    kpz: Vec<f64>,
    n_sum: usize,
}

impl Lattice {
    fn new(medium: &Medium, pump: &PumpSpec, filter: &FilterSpec, grid: &Grid2D) -> Result<Self> {
        let (nq, nw) = (grid.qx.len, grid.omega.len);
        let n_sum = 2 * nw - 1;
        let mut kz = Vec::with_capacity(grid.len());
        let mut inside = Vec::with_capacity(grid.len());
        for a in 0..grid.len() {
            let (q, w) = grid.point(a);
            kz.push(medium.k_z(q, 0.0, w)?);
            inside.push(filter.passes(q, w));
        }
        let mut pump_t = Vec::with_capacity(nq * n_sum);
        let mut kpz_t = Vec::with_capacity(nq * n_sum);
        for d in 0..nq {
            let dq = d as f64 * grid.qx.step;
            for s in 0..n_sum {
                let ws = 2.0 * grid.omega.start + s as f64 * grid.omega.step;
                pump_t.push(pump.amplitude_at(dq, 0.0, ws));
                kpz_t.push(medium.k_pz(dq, 0.0, ws)?);
            }
        }
        Ok(Self {
            n_omega: nw,
            half_length: 0.5 * medium.length(),
            kz,
            inside,
            pump: pump_t,
            kpz: kpz_t,
            n_sum,
        })
    }

    fn table_index(&self, a: usize, b: usize) -> usize {
        let (ia, ja) = (a / self.n_omega, a % self.n_omega);
        let (ib, jb) = (b / self.n_omega, b % self.n_omega);
        ia.abs_diff(ib) * self.n_sum + ja + jb
    }

    fn entry(&self, a: usize, b: usize) -> f64 {
        if !(self.inside[a] && self.inside[b]) {
            return 0.0;
        }
        let t = self.table_index(a, b);
        let delta = self.kz[a] + self.kz[b] - self.kpz[t];
        self.pump[t] * sinc(delta * self.half_length)
    }
}

/// Unweighted JSA J(q_a, Ω_a; −q_b, Ω_b) with exact dispersion.
pub fn build_jsa(medium: &Medium, pump: &PumpSpec, filter: &FilterSpec, grid: &Grid2D) -> Result<KernelMatrix> {
    build_jsa_with(medium, pump, filter, grid, Execution::default())
}

pub fn build_jsa_with(
    medium: &Medium,
    pump: &PumpSpec,
    filter: &FilterSpec,
    grid: &Grid2D,
    exec: Execution,
) -> Result<KernelMatrix> {
    if !grid.covers(filter) {
        return Err(Error::Config(format!(
            "grid q_x [{:.5}, {:.5}] × Ω ±{:.5} does not cover the filter q_x [{:.5}, {:.5}] × Ω ±{:.5}",
            grid.qx.lo(),
            grid.qx.hi(),
            grid.omega.hi(),
            filter.qx_min,
            filter.qx_max,
            filter.omega_max
        )));
    }
    let lattice = Lattice::new(medium, pump, filter, grid)?;
    let n = grid.len();
    let mut buf = vec![0.0; n * n];
    par::fill_chunks(exec, &mut buf, n, |b, col| {
        for (a, x) in col.iter_mut().enumerate() {
            *x = lattice.entry(a, b);
        }
    });
    let data = faer::MatRef::from_column_major_slice(&buf, n, n).to_owned();
    Ok(KernelMatrix {
        data,
        grid: *grid,
        weighted: false,
    })
}

/// J → W^{1/2} J W^{1/2}.
pub fn apply_quadrature(mut k: KernelMatrix) -> Result<KernelMatrix> {
    if k.weighted {
        return Err(Error::Contract("quadrature weights already applied".into()));
    }
    let w = k.grid.weight();
    let n = k.data.nrows();
    for j in 0..n {
        for i in 0..n {
            k.data[(i, j)] *= w;
        }
    }
    k.weighted = true;
    Ok(k)
}

/// max|M − Mᵀ| / max|M|.
pub fn symmetry_residual(k: &KernelMatrix) -> f64 {
    let n = k.data.nrows();
    let mut diff = 0.0_f64;
    let mut peak = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            peak = peak.max(k.data[(i, j)].abs());
            if i < j {
                diff = diff.max((k.data[(i, j)] - k.data[(j, i)]).abs());
            }
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        diff / peak
    }
}

/// Quadrature-weighted kernel in compressed-row form. Entries whose pump
/// factor is below `cutoff·A₀` are dropped; used for grids too large for a
/// dense matrix.
#[derive(Debug, Clone)]
pub struct SparseKernel {
    pub grid: Grid2D,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseKernel {
    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = M x
    pub fn apply(&self, x: &[f64], y: &mut [f64], exec: Execution) {
        let row = |a: usize| -> f64 {
            let (s, e) = (self.row_ptr[a], self.row_ptr[a + 1]);
            self.col_idx[s..e]
                .iter()
                .zip(&self.values[s..e])
                .map(|(&b, &v)| v * x[b as usize])
                .sum()
        };
        par::fill_chunks(exec, y, 1, |a, out| out[0] = row(a));
    }
}

impl crate::linalg::SymOperator for SparseKernel {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        SparseKernel::apply(self, x, y, Execution::default());
    }
}

pub fn build_jsa_sparse(
    medium: &Medium,
    pump: &PumpSpec,
    filter: &FilterSpec,
    grid: &Grid2D,
    cutoff: f64,
    exec: Execution,
) -> Result<SparseKernel> {
    if !grid.covers(filter) {
        return Err(Error::Config("grid does not cover the filter region".into()));
    }
    let lattice = Lattice::new(medium, pump, filter, grid)?;
    let w = grid.weight();
    let floor = cutoff * pump.amplitude.abs();
    let n = grid.len();
    let rows = par::map_range(exec, n, |a| {
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        if lattice.inside[a] {
            for b in 0..n {
                if lattice.pump[lattice.table_index(a, b)].abs() < floor {
                    continue;
                }
                let v = lattice.entry(a, b);
                if v != 0.0 {
                    cols.push(b as u32);
                    vals.push(v * w);
                }
            }
        }
        (cols, vals)
    });
    let nnz = rows.iter().map(|r| r.0.len()).sum();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for (c, v) in rows {
        col_idx.extend_from_slice(&c);
        values.extend_from_slice(&v);
        row_ptr.push(col_idx.len());
    }
    Ok(SparseKernel {
        grid: *grid,
        row_ptr,
        col_idx,
        values,
    })
}
