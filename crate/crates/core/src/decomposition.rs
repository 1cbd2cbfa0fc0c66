//! Spectral decomposition of the symmetric kernel, its Takagi reduction and
//! the squeezing eigenmodes built from signal/idler singular functions.

use faer::Mat;
use num_complex::Complex64;

use crate::dispersion::Medium;
use crate::kernel::{Grid2D, KernelMatrix};
use crate::linalg;
use crate::{Error, Result};

/// Relative gap below which eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Eigenpairs of the kernel ordered by |λ| descending. Each eigenvector's
/// entry of largest magnitude is positive.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
    pub grid: Grid2D,
    pub weighted: bool,
}

fn centers(grid: &Grid2D, v: faer::ColRef<'_, f64>) -> (f64, f64) {
    let (mut cw, mut cq, mut norm) = (0.0, 0.0, 0.0);
    for a in 0..v.nrows() {
        let (q, w) = grid.point(a);
        let p = v[a] * v[a];
        cw += p * w;
        cq += p * q;
        norm += p;
    }
    (cw / norm, cq / norm)
}

/// Full symmetric eigendecomposition of a kernel matrix.
pub fn spectral_decompose(k: &KernelMatrix) -> Result<Eigenpairs> {
    let n = k.data.nrows();
    if n != k.data.ncols() || n != k.grid.len() {
        return Err(Error::Contract(format!(
            "kernel is {}x{} but the grid has {} points",
            n,
            k.data.ncols(),
            k.grid.len()
        )));
    }
    let residual = crate::kernel::symmetry_residual(k);
    if residual > 1e-8 {
        return Err(Error::Contract(format!(
            "kernel asymmetry {residual:.3e} exceeds 1e-8; check the grid mirroring"
        )));
    }
    let sym;
    let data = if residual > 0.0 {
        sym = Mat::from_fn(n, n, |i, j| 0.5 * (k.data[(i, j)] + k.data[(j, i)]));
        sym.as_ref()
    } else {
        k.data.as_ref()
    };
    let (values, vectors) = linalg::sym_eigen(data)?;

    let info: Vec<(f64, f64)> = (0..n).map(|j| centers(&k.grid, vectors.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()));
    // Within runs of degenerate magnitudes order by frequency, then q_x,
    // center of mass.
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && (values[order[end - 1]].abs() - values[order[end]].abs()).abs() <= DEGENERACY_TOL * scale
        {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| {
            info[a]
                .0
                .total_cmp(&info[b].0)
                .then(info[a].1.total_cmp(&info[b].1))
        });
        start = end;
    }

    let sorted_values: Vec<f64> = order.iter().map(|&j| values[j]).collect();
    let mut sorted = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = vectors.col(src);
        let mut peak = 0.0_f64;
        let mut sign = 1.0;
        for i in 0..n {
            if col[i].abs() > peak {
                peak = col[i].abs();
                sign = col[i].signum();
            }
        }
        for i in 0..n {
            sorted[(i, dst)] = sign * col[i];
        }
    }
    Ok(Eigenpairs {
        values: sorted_values,
        vectors: sorted,
        grid: k.grid,
        weighted: k.weighted,
    })
}

/// ‖K − Σ_{m<count} λ_m w_m w_mᵀ‖_F / ‖K‖_F.
pub fn reconstruction_error(k: &KernelMatrix, pairs: &Eigenpairs, count: usize) -> f64 {
    let n = k.data.nrows();
    let count = count.min(pairs.values.len());
    let u = pairs.vectors.subcols(0, count);
    let scaled = Mat::from_fn(n, count, |i, j| u[(i, j)] * pairs.values[j]);
    let approx = &scaled * u.transpose();
    let diff = &k.data - &approx;
    diff.norm_l2() / k.data.norm_l2()
}

/// Relative Frobenius error of keeping `count` terms, from the spectrum alone.
pub fn truncation_error(values: &[f64], count: usize) -> f64 {
    let total: f64 = values.iter().map(|v| v * v).sum();
    let tail: f64 = values.iter().skip(count).map(|v| v * v).sum();
    (tail / total).sqrt()
}

/// Phase of a Takagi vector: `f_m = w_m` (real) or `f_m = i·w_m` (imaginary).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Real,
    Imaginary,
}

impl Phase {
    pub fn of(lambda: f64) -> Self {
        if lambda >= 0.0 {
            Phase::Real
        } else {
            Phase::Imaginary
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Phase::Real => "real",
            Phase::Imaginary => "imaginary",
        }
    }
}

/// Schmidt decomposition on the grid. Column ℓ of `signal` is C_ℓ at the
/// signal points; column ℓ of `idler` is D_ℓ at the mirrored points
/// (−q_x, Ω), same row order. Both have unit L² norm.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub grid: Grid2D,
    /// s_ℓ = |λ_ℓ|, descending (all of them).
    pub values: Vec<f64>,
    /// Signed eigenvalues λ_ℓ.
    pub eigenvalues: Vec<f64>,
    pub phases: Vec<Phase>,
    pub signal: Mat<f64>,
    pub idler: Mat<f64>,
}

impl ModeSet {
    /// Number of modes with stored functions.
    pub fn len(&self) -> usize {
        self.signal.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn signal_mode(&self, l: usize) -> Vec<f64> {
        self.signal.col(l).iter().copied().collect()
    }

    pub fn idler_mode(&self, l: usize) -> Vec<f64> {
        self.idler.col(l).iter().copied().collect()
    }

    /// Squeezing eigenmodes f_ℓ^± of Schmidt pair ℓ.
    pub fn squeezing_modes(&self, l: usize) -> Result<(UnionField, UnionField)> {
        squeezing_modes(&self.grid, &self.signal_mode(l), &self.idler_mode(l))
    }

    /// Squeezing spectrum: every s_ℓ twice, for f_ℓ^+ and f_ℓ^−.
    pub fn squeezing_spectrum(&self) -> Vec<f64> {
        self.values.iter().flat_map(|&s| [s, s]).collect()
    }
}

/// Split eigenvectors into signal/idler singular functions. Keeps the
/// functions of the first `count` modes (all values are kept).
pub fn takagi_reduce(pairs: &Eigenpairs, count: usize) -> Result<ModeSet> {
    if !pairs.weighted {
        return Err(Error::Contract(
            "takagi_reduce needs a quadrature-weighted kernel".into(),
        ));
    }
    let n = pairs.vectors.nrows();
    let count = count.min(pairs.values.len());
    let inv = 1.0 / pairs.grid.weight().sqrt();
    let signal = Mat::from_fn(n, count, |i, j| pairs.vectors[(i, j)] * inv);
    let idler = Mat::from_fn(n, count, |i, j| {
        let s = if pairs.values[j] >= 0.0 { 1.0 } else { -1.0 };
        s * signal[(i, j)]
    });
    Ok(ModeSet {
        grid: pairs.grid,
        values: pairs.values.iter().map(|v| v.abs()).collect(),
        eigenvalues: pairs.values.clone(),
        phases: pairs.values.iter().map(|&v| Phase::of(v)).collect(),
        signal,
        idler,
    })
}

/// A function on the union of the signal grid and its mirror image.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionField {
    pub grid: Grid2D,
    pub signal: Vec<Complex64>,
    pub idler: Vec<Complex64>,
}

impl UnionField {
    pub fn norm(&self) -> f64 {
        let s: f64 = self.signal.iter().chain(&self.idler).map(|z| z.norm_sqr()).sum();
        (s * self.grid.weight()).sqrt()
    }

    /// ⟨self, other⟩ = ∫ conj(self)·other.
    pub fn inner(&self, other: &UnionField) -> Complex64 {
        let s: Complex64 = self
            .signal
            .iter()
            .zip(&other.signal)
            .chain(self.idler.iter().zip(&other.idler))
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.weight()
    }
}

/// f⁺ = (C ⊕ D)/√2 and f⁻ = i(C ⊕ −D)/√2.
pub fn squeezing_modes(grid: &Grid2D, c: &[f64], d: &[f64]) -> Result<(UnionField, UnionField)> {
    if grid.qx.lo() <= 0.0 {
        return Err(Error::Contract(
            "signal grid reaches q_x ≤ 0, so signal and idler supports overlap".into(),
        ));
    }
    if c.len() != grid.len() || d.len() != grid.len() {
        return Err(Error::Contract("mode length does not match the grid".into()));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let plus = UnionField {
        grid: *grid,
        signal: c.iter().map(|&x| Complex64::new(r * x, 0.0)).collect(),
        idler: d.iter().map(|&x| Complex64::new(r * x, 0.0)).collect(),
    };
    let minus = UnionField {
        grid: *grid,
        signal: c.iter().map(|&x| Complex64::new(0.0, r * x)).collect(),
        idler: d.iter().map(|&x| Complex64::new(0.0, -r * x)).collect(),
    };
    Ok((plus, minus))
}

/// Output-face functions f̄ = f·exp(i k_z(q, Ω) L/2) for propagation length
/// `length` [μm]; k_z is even in q_x so both halves share the phase.
pub fn propagate_to_output(field: &UnionField, medium: &Medium, length: f64) -> Result<UnionField> {
    let g = &field.grid;
    let mut out = field.clone();
    for a in 0..g.len() {
        let (q, w) = g.point(a);
        let ph = Complex64::from_polar(1.0, 0.5 * medium.k_z(q, 0.0, w)? * length);
        out.signal[a] *= ph;
        out.idler[a] *= ph;
    }
    Ok(out)
}
