//! Periodic grid geometry and spectral calculus on the flat torus
//! `(ℝ/2πℤ)^{2n}`, viewed as ℂⁿ with the standard Kähler form.
//!
//! The metric is the identity, so covariant derivatives are plain partials
//! and eigenvalues relative to ω are ordinary Hermitian eigenvalues. Real
//! axes are ordered `(x₁, y₁, …, x_n, y_n)`, row-major with the last axis
//! fastest; this fixes the file format and all index arithmetic.
//!
//! Differentiation is spectral (Fourier multipliers) with no dealiasing;
//! inputs are restricted to resolved trigonometric polynomials plus solver
//! outputs, and grid-refinement tests guard against aliasing surprises.

pub mod fft;

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::cone::EigenTuple;
use crate::error::Error;
use crate::herm::{self, CMat};
use crate::reduce;
use crate::Result;

/// Hard cap on total grid points (memory guard).
pub const MAX_POINTS: usize = 1 << 24;

/// Uniform periodic grid on the flat torus of complex dimension `n`
/// (so `2n` real axes), `points_per_axis` samples per axis on `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    pub n: usize,
    pub points_per_axis: usize,
    pub npoints: usize,
}

impl TorusGrid {
    pub fn new(n: usize, points_per_axis: usize) -> Result<Self> {
        if !(1..=4).contains(&n) {
            return Err(Error::domain(format!("complex dimension {n} outside 1..=4")));
        }
        if points_per_axis % 2 != 0 || !(4..=64).contains(&points_per_axis) {
            return Err(Error::domain(format!(
                "points per axis {points_per_axis} must be even and within 4..=64"
            )));
        }
        let axes = 2 * n;
        let mut npoints = 1usize;
        for _ in 0..axes {
            npoints = npoints
                .checked_mul(points_per_axis)
                .filter(|&p| p <= MAX_POINTS)
                .ok_or_else(|| {
                    Error::domain(format!(
                        "grid {points_per_axis}^{axes} exceeds the {MAX_POINTS}-point cap"
                    ))
                })?;
        }
        Ok(TorusGrid {
            n,
            points_per_axis,
            npoints,
        })
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    /// Grid spacing `2π / N` (same on every axis).
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points_per_axis as f64
    }

    /// Row-major stride of an axis (last axis fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.axes() - 1 - axis) as u32)
    }

    /// Index of `point` along `axis`.
    pub fn axis_coord(&self, point: usize, axis: usize) -> usize {
        (point / self.stride(axis)) % self.points_per_axis
    }

    /// Total volume `(2π)^{2n}`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.axes() as i32)
    }

    /// Complex coordinates of a grid point.
    pub fn complex_coords(&self, point: usize) -> Vec<Complex64> {
        (0..self.n)
            .map(|alpha| {
                let x = self.axis_coord(point, 2 * alpha) as f64 * self.spacing();
                let y = self.axis_coord(point, 2 * alpha + 1) as f64 * self.spacing();
                Complex64::new(x, y)
            })
            .collect()
    }
}

/// One trigonometric mode `amplitude · cos(⟨k, x⟩ + phase)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigMode {
    /// Integer wavevector over the `2n` real axes.
    pub wave: Vec<i64>,
    pub amplitude: f64,
    pub phase: f64,
}

/// Real scalar field sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.npoints],
        }
    }

    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.npoints {
            return Err(Error::domain("field length does not match grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("field has non-finite entries"));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn mean(&self) -> f64 {
        reduce::pairwise_sum(&self.values) / self.grid.npoints as f64
    }

    pub fn sup_abs(&self) -> f64 {
        reduce::sup_abs(&self.values)
    }

    /// Subtracts the mean in place (the solver gauge).
    pub fn remove_mean(&mut self) {
        let m = self.mean();
        self.values.par_iter_mut().for_each(|v| *v -= m);
    }

    /// `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &ScalarField) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::domain("grid mismatch in field arithmetic"));
        }
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(ScalarField {
            grid: self.grid,
            values,
        })
    }
}

/// Grid-sampled Hermitian `n×n` matrix field.
///
/// Per-point layout: `n` real diagonal entries, then `(re, im)` for each
/// upper-triangle entry `(i, j)`, `i < j`, in lexicographic order. Hermitian
/// symmetry is exact by storage.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianField {
    pub grid: TorusGrid,
    pub data: Vec<f64>,
}

impl HermitianField {
    pub fn entries_per_point(n: usize) -> usize {
        n * n
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        HermitianField {
            grid,
            data: vec![0.0; grid.npoints * Self::entries_per_point(grid.n)],
        }
    }

    pub fn from_data(grid: TorusGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.npoints * Self::entries_per_point(grid.n) {
            return Err(Error::domain("hermitian field length does not match grid"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("hermitian field has non-finite entries"));
        }
        Ok(HermitianField { grid, data })
    }

    pub fn point(&self, p: usize) -> &[f64] {
        let e = Self::entries_per_point(self.grid.n);
        &self.data[p * e..(p + 1) * e]
    }

    /// Unpacks one grid point into a dense matrix.
    pub fn matrix_at(&self, p: usize) -> CMat {
        unpack_point(self.grid.n, self.point(p))
    }

    /// Constant field from one Hermitian matrix.
    pub fn constant(grid: TorusGrid, mat: &CMat) -> Result<Self> {
        if mat.n != grid.n {
            return Err(Error::domain("matrix dimension does not match grid"));
        }
        let e = Self::entries_per_point(grid.n);
        let mut proto = vec![0.0; e];
        pack_point(grid.n, mat, &mut proto);
        let mut data = vec![0.0; grid.npoints * e];
        data.par_chunks_mut(e).for_each(|chunk| chunk.copy_from_slice(&proto));
        Ok(HermitianField { grid, data })
    }

    /// Adds a constant Hermitian matrix to every point, in place.
    pub fn add_constant(&mut self, mat: &CMat) {
        let n = self.grid.n;
        let e = Self::entries_per_point(n);
        let mut proto = vec![0.0; e];
        pack_point(n, mat, &mut proto);
        self.data.par_chunks_mut(e).for_each(|chunk| {
            for (c, p) in chunk.iter_mut().zip(proto.iter()) {
                *c += p;
            }
        });
    }

    /// Adds `t · I` to every point, in place.
    pub fn add_scalar_diag(&mut self, t: f64) {
        let n = self.grid.n;
        let e = Self::entries_per_point(n);
        self.data.par_chunks_mut(e).for_each(|chunk| {
            for d in chunk.iter_mut().take(n) {
                *d += t;
            }
        });
    }

    /// Pointwise sum of two fields on the same grid.
    pub fn add(&self, other: &HermitianField) -> Result<HermitianField> {
        if self.grid != other.grid {
            return Err(Error::domain("grid mismatch in hermitian field sum"));
        }
        let data = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(HermitianField {
            grid: self.grid,
            data,
        })
    }

    pub fn scale(&mut self, s: f64) {
        self.data.par_iter_mut().for_each(|v| *v *= s);
    }

    pub fn sup_abs(&self) -> f64 {
        reduce::sup_abs(&self.data)
    }

    /// Grid mean of the matrix entries as one Hermitian matrix.
    pub fn mean_matrix(&self) -> CMat {
        let n = self.grid.n;
        let e = Self::entries_per_point(n);
        let npoints = self.grid.npoints as f64;
        let mut means = vec![0.0; e];
        for (slot, mean) in means.iter_mut().enumerate() {
            *mean = reduce::pairwise_sum_by(self.grid.npoints, &|p| self.data[p * e + slot])
                / npoints;
        }
        unpack_point(n, &means)
    }
}

/// Per-point complex n-vector (holomorphic gradients).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVectorField {
    pub grid: TorusGrid,
    pub data: Vec<Complex64>,
}

impl ComplexVectorField {
    pub fn vector_at(&self, p: usize) -> &[Complex64] {
        let n = self.grid.n;
        &self.data[p * n..(p + 1) * n]
    }

    /// Sup over the grid of the Euclidean norm `√(Σ_α |v_α|²)`.
    pub fn sup_norm(&self) -> f64 {
        let n = self.grid.n;
        reduce::max_by(self.grid.npoints, |p| {
            self.data[p * n..(p + 1) * n]
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
    }
}

/// Per-point sorted-descending eigenvalues of a Hermitian field.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenField {
    pub grid: TorusGrid,
    pub data: Vec<f64>,
}

impl EigenField {
    pub fn point(&self, p: usize) -> &[f64] {
        let n = self.grid.n;
        &self.data[p * n..(p + 1) * n]
    }

    pub fn tuple_at(&self, p: usize) -> EigenTuple {
        EigenTuple::new(self.point(p).to_vec()).expect("eigenvalues are finite")
    }

    /// Minimum over the grid of `f(λ(p))`.
    pub fn min_over_points(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let n = self.grid.n;
        reduce::min_by(self.grid.npoints, |p| f(&self.data[p * n..(p + 1) * n]))
    }

    /// Maximum over the grid of `f(λ(p))`.
    pub fn max_over_points(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let n = self.grid.n;
        reduce::max_by(self.grid.npoints, |p| f(&self.data[p * n..(p + 1) * n]))
    }
}

fn pair_slot(n: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in lexicographic upper-triangle order
    debug_assert!(i < j && j < n);
    let before = i * n - i * (i + 1) / 2; // pairs with first index < i
    n + 2 * (before + (j - i - 1))
}

/// Packed point slice → dense Hermitian matrix.
pub fn unpack_point(n: usize, slice: &[f64]) -> CMat {
    let mut m = CMat::zero(n);
    for i in 0..n {
        m.a[i][i] = Complex64::new(slice[i], 0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = pair_slot(n, i, j);
            let v = Complex64::new(slice[s], slice[s + 1]);
            m.a[i][j] = v;
            m.a[j][i] = v.conj();
        }
    }
    m
}

/// Dense Hermitian matrix → packed point slice (upper triangle wins).
pub fn pack_point(n: usize, m: &CMat, out: &mut [f64]) {
    for i in 0..n {
        out[i] = m.a[i][i].re;
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = pair_slot(n, i, j);
            out[s] = m.a[i][j].re;
            out[s + 1] = m.a[i][j].im;
        }
    }
}

/// Samples `Σ amplitude · cos(⟨k, x⟩ + phase)` on the grid. Every wavevector
/// component must satisfy `|k_c| < N/2` (resolvable, Nyquist excluded).
pub fn trig_field(grid: TorusGrid, modes: &[TrigMode]) -> Result<ScalarField> {
    let axes = grid.axes();
    let half = (grid.points_per_axis / 2) as i64;
    for mode in modes {
        if mode.wave.len() != axes {
            return Err(Error::domain(format!(
                "wavevector has {} components, grid has {axes} axes",
                mode.wave.len()
            )));
        }
        if mode.wave.iter().any(|k| k.abs() >= half) {
            return Err(Error::domain(format!(
                "mode {:?} not resolvable on {} points per axis",
                mode.wave, grid.points_per_axis
            )));
        }
        if !mode.amplitude.is_finite() || !mode.phase.is_finite() {
            return Err(Error::domain("non-finite mode parameters"));
        }
    }
    let h = grid.spacing();
    let mut values = vec![0.0; grid.npoints];
    values.par_iter_mut().enumerate().for_each(|(p, v)| {
        let mut acc = 0.0;
        for mode in modes {
            let mut dot = 0i64;
            for (axis, &k) in mode.wave.iter().enumerate() {
                dot += k * grid.axis_coord(p, axis) as i64;
            }
            acc += mode.amplitude * (h * dot as f64 + mode.phase).cos();
        }
        *v = acc;
    });
    Ok(ScalarField { grid, values })
}

/// Signed frequency with the Nyquist line dropped — the convention for odd
/// (first-order) derivative factors.
fn odd_freq(f: i64, n_axis: i64) -> f64 {
    if 2 * f == n_axis {
        0.0
    } else {
        f as f64
    }
}

/// Fourier multiplier of the complex Hessian entry `(α, β)`:
/// `m_{αβ}(k) = −¼ conj(ζ_α) ζ_β` with `ζ_γ = k_{x_γ} + i k_{y_γ}`.
/// The diagonal keeps the Nyquist contribution of the pure second
/// derivatives; mixed entries drop it (odd factors).
pub(crate) fn hessian_symbol(freq: &[i64], n_axis: i64, alpha: usize, beta: usize) -> Complex64 {
    if alpha == beta {
        let kx = freq[2 * alpha] as f64;
        let ky = freq[2 * alpha + 1] as f64;
        Complex64::new(-0.25 * (kx * kx + ky * ky), 0.0)
    } else {
        let za = Complex64::new(
            odd_freq(freq[2 * alpha], n_axis),
            odd_freq(freq[2 * alpha + 1], n_axis),
        );
        let zb = Complex64::new(
            odd_freq(freq[2 * beta], n_axis),
            odd_freq(freq[2 * beta + 1], n_axis),
        );
        za.conj() * zb * (-0.25)
    }
}

/// Complex Hessian `u_{αβ̄} = ¼(u_{x_αx_β} + u_{y_αy_β}) + (i/4)(u_{x_αy_β} − u_{y_αx_β})`
/// by spectral differentiation; exactly Hermitian by construction.
pub fn complex_hessian(f: &ScalarField) -> HermitianField {
    let grid = f.grid;
    let n = grid.n;
    let n_axis = grid.points_per_axis as i64;
    let mut fhat: Vec<Complex64> = f.values.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&grid, &mut fhat);

    let e = HermitianField::entries_per_point(n);
    let mut out = HermitianField::zeros(grid);
    let mut spec = vec![Complex64::ZERO; grid.npoints];
    for alpha in 0..n {
        for beta in alpha..n {
            fft::for_each_mode(&grid, |p, freq| {
                spec[p] = fhat[p] * hessian_symbol(freq, n_axis, alpha, beta);
            });
            fft::inverse(&grid, &mut spec);
            if alpha == beta {
                out.data
                    .par_chunks_mut(e)
                    .zip(spec.par_iter())
                    .for_each(|(chunk, v)| chunk[alpha] = v.re);
            } else {
                let s = pair_slot(n, alpha, beta);
                out.data
                    .par_chunks_mut(e)
                    .zip(spec.par_iter())
                    .for_each(|(chunk, v)| {
                        chunk[s] = v.re;
                        chunk[s + 1] = v.im;
                    });
            }
        }
    }
    out
}

/// Holomorphic gradient `(∂f/∂z_α)_α` with `∂/∂z_α = ½(∂_{x_α} − i ∂_{y_α})`.
pub fn complex_gradient(f: &ScalarField) -> ComplexVectorField {
    let grid = f.grid;
    let n = grid.n;
    let n_axis = grid.points_per_axis as i64;
    let mut fhat: Vec<Complex64> = f.values.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&grid, &mut fhat);

    let mut data = vec![Complex64::ZERO; grid.npoints * n];
    let mut spec = vec![Complex64::ZERO; grid.npoints];
    for alpha in 0..n {
        fft::for_each_mode(&grid, |p, freq| {
            let kx = odd_freq(freq[2 * alpha], n_axis);
            let ky = odd_freq(freq[2 * alpha + 1], n_axis);
            // ½(i k_x + k_y)
            spec[p] = fhat[p] * Complex64::new(0.5 * ky, 0.5 * kx);
        });
        fft::inverse(&grid, &mut spec);
        data.par_chunks_mut(n)
            .zip(spec.par_iter())
            .for_each(|(chunk, v)| chunk[alpha] = *v);
    }
    ComplexVectorField { grid, data }
}

/// First spectral derivative along one real axis of a complex-valued grid
/// function (used to differentiate Hermitian entry fields).
pub fn first_derivative_complex(grid: &TorusGrid, values: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n_axis = grid.points_per_axis as i64;
    let mut spec = values.to_vec();
    fft::forward(grid, &mut spec);
    fft::for_each_mode(grid, |p, freq| {
        let k = odd_freq(freq[axis], n_axis);
        spec[p] *= Complex64::new(0.0, k);
    });
    fft::inverse(grid, &mut spec);
    spec
}

/// Per-point sorted-descending eigenvalues.
pub fn pointwise_eigs(h: &HermitianField) -> EigenField {
    let grid = h.grid;
    let n = grid.n;
    let e = HermitianField::entries_per_point(n);
    let mut data = vec![0.0; grid.npoints * n];
    data.par_chunks_mut(n)
        .zip(h.data.par_chunks(e))
        .for_each(|(out, point)| {
            let m = unpack_point(n, point);
            let eig = herm::eigenvalues(&m);
            out.copy_from_slice(&eig[..n]);
        });
    EigenField { grid, data }
}

/// `∫ f dV = (2π)^{2n} · mean(f)` — exact for trigonometric polynomials the
/// grid resolves, deterministic via the pairwise reduction.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid.volume() * f.mean()
}

/// `χ = C + i∂∂̄ρ`: constant Hermitian part plus the complex Hessian of a
/// potential. Closed by construction, and the grid integral of each matrix
/// entry is the corresponding entry of `C · (2π)^{2n}`.
pub fn build_chi(grid: TorusGrid, constant: &CMat, rho: &ScalarField) -> Result<HermitianField> {
    if constant.n != grid.n {
        return Err(Error::domain("constant part dimension does not match grid"));
    }
    if rho.grid != grid {
        return Err(Error::domain("potential grid does not match target grid"));
    }
    let herm_err = constant
        .add(&constant.adjoint().scale(-1.0))
        .max_abs();
    if herm_err > 1e-12 * constant.max_abs().max(1.0) {
        return Err(Error::domain("constant part is not Hermitian"));
    }
    let mut chi = complex_hessian(rho);
    chi.add_constant(constant);
    Ok(chi)
}
