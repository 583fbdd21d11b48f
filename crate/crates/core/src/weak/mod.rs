//! Desk-scale checkers for the weak-solution machinery: mollification with
//! the standard bump kernel, the dimension lift `v ↦ v + |z_{n+1}|²`,
//! pointwise cone/subsolution margins on quadratic test functions, the four
//! parts of the key mollification lemma, the polarized Garding positivity,
//! and the comparison principle on certified sub/supersolution pairs.
//!
//! The test class is quadratics `v(z) = z*Qz + 2Re⟨l, z⟩ + c`: they realize
//! every pointwise hypothesis of the lemmas exactly, their mollification is
//! a constant shift in closed form, and their Hessian algebra is finite.

pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cone::sigma_all;
use crate::error::Error;
use crate::field::{fft, ScalarField};
use crate::herm::{self, CMat, MAX_N};
use crate::reduce;
use crate::sampling::{self, SeedRng};
use crate::Result;

/// Mollifier data: the bump `η(y) = C e^{1/(|y|²−1)}` on the unit ball of
/// `ℂⁿ`, unit mass in Lebesgue measure, with its second moments.
#[derive(Clone, Copy, Debug)]
pub struct MollifierKernel {
    /// Complex dimension the kernel normalizes over.
    pub n: usize,
    pub radius: f64,
    /// Normalization constant of the n-dimensional bump.
    pub c_norm: f64,
    /// Total second moment `∫ |y|² η(y) dy` over ℂⁿ.
    pub second_moment_total: f64,
    /// Second moment `M = ∫_ℂ |y|² η₀(y) dy` of the one-complex-dimension
    /// kernel (the constant in the lifted-mollification identity).
    pub second_moment_1d: f64,
}

/// Quadrature points per radial rule.
const KERNEL_QUAD_POINTS: usize = 64;

impl MollifierKernel {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if n == 0 || n > 4 {
            return Err(Error::domain("kernel dimension outside 1..=4"));
        }
        if radius <= 0.0 {
            return Err(Error::domain("kernel radius must be positive"));
        }
        let d = 2 * n;
        let mass_integral = quadrature::sphere_area_even_dim(d)
            * quadrature::bump_radial_integral(d - 1, KERNEL_QUAD_POINTS);
        let c_norm = 1.0 / mass_integral;
        let second_total = c_norm
            * quadrature::sphere_area_even_dim(d)
            * quadrature::bump_radial_integral(d + 1, KERNEL_QUAD_POINTS);
        let mass_1d =
            quadrature::sphere_area_even_dim(2) * quadrature::bump_radial_integral(1, KERNEL_QUAD_POINTS);
        let second_1d = quadrature::sphere_area_even_dim(2)
            * quadrature::bump_radial_integral(3, KERNEL_QUAD_POINTS)
            / mass_1d;
        Ok(MollifierKernel {
            n,
            radius,
            c_norm,
            second_moment_total: second_total,
            second_moment_1d: second_1d,
        })
    }

    /// Recomputes `∫ η` at a given quadrature refinement (normalization
    /// self-check; 1 up to quadrature error).
    pub fn mass_at_refinement(&self, npoints: usize) -> f64 {
        self.c_norm
            * quadrature::sphere_area_even_dim(2 * self.n)
            * quadrature::bump_radial_integral(2 * self.n - 1, npoints)
    }

    /// Additive constant `r² M` of the lifted mollification.
    pub fn lift_shift(&self) -> f64 {
        self.radius * self.radius * self.second_moment_1d
    }
}

/// Quadratic test function `v(z) = z*Qz + 2Re⟨l, z⟩ + c` with Hermitian `Q`.
#[derive(Clone, Debug)]
pub struct QuadraticTestFn {
    pub n: usize,
    pub q: CMat,
    pub linear: [Complex64; MAX_N],
    pub constant: f64,
    /// Eigenvalues of `Q`, sorted descending.
    pub eigen: [f64; MAX_N],
}

impl QuadraticTestFn {
    pub fn new(q: CMat, linear: [Complex64; MAX_N], constant: f64) -> Self {
        let eigen = herm::eigenvalues(&q);
        QuadraticTestFn {
            n: q.n,
            q,
            linear,
            constant,
            eigen,
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        let mut acc = self.constant;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += (z[i].conj() * self.q.a[i][j] * z[j]).re;
            }
            acc += 2.0 * (self.linear[i].conj() * z[i]).re;
        }
        acc
    }

    /// Holomorphic gradient `(∂v/∂z_k)_k = conj(Qz + l)`.
    pub fn holomorphic_gradient(&self, z: &[Complex64]) -> [Complex64; MAX_N] {
        let mut out = [Complex64::ZERO; MAX_N];
        for k in 0..self.n {
            let mut qz = Complex64::ZERO;
            for j in 0..self.n {
                qz += self.q.a[k][j] * z[j];
            }
            out[k] = (qz + self.linear[k]).conj();
        }
        out
    }

    /// Complex Hessian of `½ v²` at `z`: `v(z)·Q + g g*` with the
    /// holomorphic gradient `g`.
    pub fn half_square_hessian(&self, z: &[Complex64]) -> CMat {
        let v = self.eval(z);
        let g = self.holomorphic_gradient(z);
        CMat::from_fn(self.n, |i, j| v * self.q.a[i][j] + g[i] * g[j].conj())
    }
}

/// Pointwise margins of the subsolution/cone checks on a spectrum.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConeMargins {
    /// `σ_{n−1}(λ) + σ_n(λ)`.
    pub subsolution: f64,
    /// `min_{m ≤ n−1} σ_m(λ)` (closure of `Γ_{n−1}`).
    pub cone: f64,
}

impl ConeMargins {
    pub fn min(&self) -> f64 {
        self.subsolution.min(self.cone)
    }
}

/// Margins from a sorted or unsorted spectrum.
pub fn cone_margins(lam: &[f64]) -> ConeMargins {
    let n = lam.len();
    let sig = sigma_all(lam);
    let cone = sig[1..n].iter().cloned().fold(f64::INFINITY, f64::min);
    ConeMargins {
        subsolution: sig[n] + sig[n - 1],
        cone,
    }
}

/// Margins of a Hermitian matrix point.
pub fn matrix_cone_margins(m: &CMat) -> ConeMargins {
    let eig = herm::eigenvalues(m);
    cone_margins(&eig[..m.n])
}

/// Which hypothesis a pointwise check is testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeCheckMode {
    /// Subsolution of `σ_{n−1} + σ_n = 0`: both margin components apply.
    Subsolution,
    /// `(n−1)`-admissibility only: the spectrum in the closure of `Γ_{n−1}`.
    Admissible,
}

/// Pointwise check of a Hessian sample against the selected hypothesis;
/// the subsolution component is reported as +∞ in admissible mode (not
/// claimed there).
pub fn pointwise_cone_check(hessian: &CMat, mode: ConeCheckMode) -> ConeMargins {
    let m = matrix_cone_margins(hessian);
    match mode {
        ConeCheckMode::Subsolution => m,
        ConeCheckMode::Admissible => ConeMargins {
            subsolution: f64::INFINITY,
            cone: m.cone,
        },
    }
}

/// Exact mollification of a quadratic: the Hessian and linear part are
/// unchanged; the constant shifts by `r² tr(Q) m₂ / n` (per-complex-coord
/// second moment of the kernel).
pub fn mollify_quadratic(v: &QuadraticTestFn, kernel: &MollifierKernel) -> Result<QuadraticTestFn> {
    if kernel.n != v.n {
        return Err(Error::domain("kernel dimension does not match quadratic"));
    }
    let r2 = kernel.radius * kernel.radius;
    let shift = r2 * v.q.trace().re * kernel.second_moment_total / v.n as f64;
    Ok(QuadraticTestFn::new(v.q, v.linear, v.constant + shift))
}

/// Periodic grid mollification: convolution with the grid-sampled, discretely
/// renormalized kernel via Fourier multiplication. Requires `r ≥ 2 h`.
pub fn mollify_grid(f: &ScalarField, radius: f64) -> Result<ScalarField> {
    let grid = f.grid;
    let h = grid.spacing();
    if radius < 2.0 * h {
        return Err(Error::domain(format!(
            "mollification radius {radius:.3e} below the resolvable scale 2h = {:.3e}",
            2.0 * h
        )));
    }
    let n_axis = grid.points_per_axis;
    // sampled kernel on periodic displacements mapped to (−π, π]
    let samples: Vec<f64> = (0..grid.npoints)
        .map(|p| {
            let mut r2 = 0.0;
            for axis in 0..grid.axes() {
                let idx = grid.axis_coord(p, axis);
                let signed = if idx * 2 > n_axis {
                    idx as f64 - n_axis as f64
                } else {
                    idx as f64
                };
                let d = signed * h;
                r2 += d * d;
            }
            let scaled = r2 / (radius * radius);
            if scaled < 1.0 {
                (1.0 / (scaled - 1.0)).exp()
            } else {
                0.0
            }
        })
        .collect();
    let total = reduce::pairwise_sum(&samples);
    if total <= 0.0 {
        return Err(Error::domain("kernel support does not meet the grid"));
    }
    let mut khat: Vec<Complex64> = samples
        .iter()
        .map(|&v| Complex64::new(v / total, 0.0))
        .collect();
    fft::forward(&grid, &mut khat);
    let mut spec: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&grid, &mut spec);
    for (s, k) in spec.iter_mut().zip(khat.iter()) {
        *s *= *k;
    }
    fft::inverse(&grid, &mut spec);
    Ok(ScalarField {
        grid,
        values: spec.iter().map(|c| c.re).collect(),
    })
}

/// Lifted mollification of a quadratic: `⟨ṽ⟩_r = [v]_r + |z_{n+1}|² + r²M`.
/// Returns the mollified base and the additive constant `r²M`.
pub fn lifted_mollify(v: &QuadraticTestFn, kernel: &MollifierKernel) -> Result<(QuadraticTestFn, f64)> {
    Ok((mollify_quadratic(v, kernel)?, kernel.lift_shift()))
}

/// Direct 2-D quadrature of `∫ |z + r y|² η₀(y) dy − (|z|² + r²M)`:
/// the lifted-mollification identity gap at one sample point.
pub fn lift_identity_gap(kernel: &MollifierKernel, z: Complex64, quad_points: usize) -> f64 {
    let (nodes, weights) = quadrature::gauss_legendre(quad_points);
    let c1 = 1.0
        / (quadrature::sphere_area_even_dim(2)
            * quadrature::bump_radial_integral(1, KERNEL_QUAD_POINTS));
    let mut acc = 0.0;
    for (xi, wi) in nodes.iter().zip(weights.iter()) {
        for (yj, wj) in nodes.iter().zip(weights.iter()) {
            let y = Complex64::new(*xi, *yj);
            let r2 = y.norm_sqr();
            if r2 >= 1.0 {
                continue;
            }
            let eta = c1 * (1.0 / (r2 - 1.0)).exp();
            let shifted = z + kernel.radius * y;
            acc += wi * wj * eta * shifted.norm_sqr();
        }
    }
    acc - (z.norm_sqr() + kernel.lift_shift())
}

/// Samples a quadratic weak solution of `σ_{n−1} + σ_n = 0`: positive
/// `λ' ∈ Γ_{n−1}` entries, last eigenvalue solved in closed form
/// `x = −σ_{n−1}(λ') / (σ_{n−2}(λ') + σ_{n−1}(λ'))`, conjugated by a seeded
/// unitary with seeded linear and constant parts.
pub fn sample_solution_quadratic(seed: u64, n: usize) -> Result<QuadraticTestFn> {
    if n < 2 || n > 4 {
        return Err(Error::domain("solution quadratics need 2 <= n <= 4"));
    }
    let mut rng = SeedRng::new(seed);
    loop {
        let lam_prime: Vec<f64> = (0..n - 1).map(|_| rng.range(0.2, 2.0)).collect();
        let sig = sigma_all(&lam_prime);
        let denom = sig[n - 2] + sig[n - 1];
        if denom.abs() < 1e-12 {
            continue;
        }
        let x = -sig[n - 1] / denom;
        let mut lam = lam_prime.clone();
        lam.push(x);
        let margins = cone_margins(&lam);
        if margins.subsolution.abs() > 1e-12 || margins.cone < -1e-14 {
            continue;
        }
        let u = sampling::unitary(&mut rng, n);
        let d = CMat::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(lam[i], 0.0)
            } else {
                Complex64::ZERO
            }
        });
        let q = d.conjugate_by(&u).hermitize();
        let mut linear = [Complex64::ZERO; MAX_N];
        for slot in linear.iter_mut().take(n) {
            *slot = rng.complex_normal() * 0.3;
        }
        let v = QuadraticTestFn::new(q, linear, 0.5);
        // post-conditions: exact-zero subsolution margin and v + |z|² psh
        let eig_margins = cone_margins(&v.eigen[..n]);
        if eig_margins.subsolution.abs() > 1e-10 || eig_margins.cone < -1e-10 {
            continue;
        }
        if v.eigen[n - 1] < -1.0 {
            continue;
        }
        return Ok(v);
    }
}

/// Samples a quadratic with spectrum in `Γ_k` (k-subharmonic test input).
pub fn sample_gamma_k_quadratic(rng: &mut SeedRng, n: usize, k: usize) -> QuadraticTestFn {
    loop {
        let lam: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 3.0)).collect();
        let sig = sigma_all(&lam);
        if (1..=k).all(|m| sig[m] > 0.0) {
            let u = sampling::unitary(rng, n);
            let d = CMat::from_fn(n, |i, j| {
                if i == j {
                    Complex64::new(lam[i], 0.0)
                } else {
                    Complex64::ZERO
                }
            });
            return QuadraticTestFn::new(d.conjugate_by(&u).hermitize(), [Complex64::ZERO; MAX_N], 0.0);
        }
    }
}

/// Report of the key-lemma margin checks on one sampled solution quadratic.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KeyLemmaReport {
    /// Part (ii): worst margin of the mollified quadratic.
    pub mollified_margin: f64,
    /// Part (iii): worst margin of `Hess(½v²)` over sampled points with
    /// `0 ≤ v ≤ 1`.
    pub half_square_margin: f64,
    /// Number of admissible sample points entering part (iii).
    pub half_square_points: usize,
    /// Part (iv): worst margin of the midpoint with an independent
    /// subsolution partner.
    pub midpoint_margin: f64,
}

/// Runs parts (ii)–(iv) of the mollification lemma on a sampled quadratic.
///
/// `domain_half_width` bounds the sampling box for part (iii); points are
/// kept only where `0 ≤ v(z) ≤ 1` (the hypothesis is used pointwise).
pub fn keylemmavr_checks(
    v: &QuadraticTestFn,
    kernel: &MollifierKernel,
    domain_half_width: f64,
    samples: usize,
    seed: u64,
) -> Result<KeyLemmaReport> {
    let n = v.n;
    let mut rng = SeedRng::new(seed);
    // (ii): mollifying a quadratic shifts it by a constant, so the margins
    // coincide with v's own
    let mollified = mollify_quadratic(v, kernel)?;
    let m2 = matrix_cone_margins(&mollified.q);
    let mollified_margin = m2.min();

    // (iii)
    let mut half_square_margin = f64::INFINITY;
    let mut kept = 0usize;
    let mut attempts = 0usize;
    while kept < samples && attempts < 100 * samples {
        attempts += 1;
        let z: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::new(
                    rng.range(-domain_half_width, domain_half_width),
                    rng.range(-domain_half_width, domain_half_width),
                )
            })
            .collect();
        let val = v.eval(&z);
        if !(0.0..=1.0).contains(&val) {
            continue;
        }
        kept += 1;
        let hess = v.half_square_hessian(&z);
        half_square_margin = half_square_margin.min(matrix_cone_margins(&hess).min());
    }

    // (iv): midpoint with an independently sampled solution quadratic
    let w = sample_solution_quadratic(seed ^ 0x9e37_79b9, n)?;
    let mid = v.q.add(&w.q).scale(0.5);
    let midpoint_margin = matrix_cone_margins(&mid).min();

    Ok(KeyLemmaReport {
        mollified_margin,
        half_square_margin,
        half_square_points: kept,
        midpoint_margin,
    })
}

/// Pre/post margins for mollifying a pointwise-subsolution grid field
/// `C + i∂∂̄g`: both must stay nonnegative (convexity of the cone bundle).
pub fn grid_mollification_margins(
    base: &CMat,
    g: &ScalarField,
    radius: f64,
) -> Result<(f64, f64)> {
    let grid = g.grid;
    if base.n != grid.n {
        return Err(Error::domain("base matrix dimension does not match grid"));
    }
    let margin_of = |field: &ScalarField| -> f64 {
        let mut hess = crate::field::complex_hessian(field);
        hess.add_constant(base);
        let eigs = crate::field::pointwise_eigs(&hess);
        eigs.min_over_points(|lam| cone_margins(lam).min())
    };
    let pre = margin_of(g);
    let post = margin_of(&mollify_grid(g, radius)?);
    Ok((pre, post))
}

/// Polarized `σ_k` of `k` Hermitian matrices via the subset-sum formula
/// `(1/k!) Σ_{∅≠S} (−1)^{k−|S|} σ_k(Σ_{i∈S} A_i)`; nonnegative when every
/// spectrum lies in `Γ̄_k`.
pub fn polarized_sigma_k(mats: &[CMat]) -> f64 {
    let k = mats.len();
    assert!(k >= 1);
    let n = mats[0].n;
    let mut total = 0.0f64;
    for mask in 1u32..(1 << k) {
        let mut sum = CMat::zero(n);
        for (i, m) in mats.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum = sum.add(m);
            }
        }
        let eig = herm::eigenvalues(&sum);
        let sig = sigma_all(&eig[..n]);
        let sign = if (k - (mask.count_ones() as usize)) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        total += sign * sig[k];
    }
    let mut fact = 1.0f64;
    for i in 2..=k {
        fact *= i as f64;
    }
    total / fact
}

/// Outcome of one comparison-principle check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparisonOutcome {
    /// Interior domination held (value: worst interior gap ≥ −1e−10).
    Holds,
    /// Interior domination failed.
    Violated,
    /// The boundary hypothesis `w ≤ v` failed; check skipped.
    SkippedBoundaryHypothesis,
}

/// Supersolution partner `v = w + ε·Re(Σ β_α z_α²) + offset`: a pluriharmonic
/// bump plus a constant on top of a solution quadratic, so both comparison
/// hypotheses are certifiable.
#[derive(Clone, Debug)]
pub struct SupersolutionPartner {
    pub base: QuadraticTestFn,
    pub pluri: [Complex64; MAX_N],
    pub eps: f64,
    pub offset: f64,
}

impl SupersolutionPartner {
    pub fn eval(&self, z: &[Complex64]) -> f64 {
        let mut acc = self.base.eval(z) + self.offset;
        for i in 0..self.base.n {
            acc += self.eps * (self.pluri[i] * z[i] * z[i]).re;
        }
        acc
    }
}

/// Builds a certified partner. On the closed ball,
/// `ε Σ Re(β_α z_α²) ≥ −ε max_α|β_α| · R²`, so that offset makes the gap to
/// `w` nonnegative everywhere — boundary hypothesis included, not just on
/// the sampled points.
pub fn make_supersolution_partner(
    w_sub: &QuadraticTestFn,
    rng: &mut SeedRng,
    ball_radius: f64,
) -> SupersolutionPartner {
    let n = w_sub.n;
    let mut pluri = [Complex64::ZERO; MAX_N];
    for slot in pluri.iter_mut().take(n) {
        *slot = rng.complex_normal() * 0.5;
    }
    let eps = rng.range(0.05, 0.3);
    let beta_max = pluri.iter().take(n).fold(0.0f64, |m, b| m.max(b.norm()));
    SupersolutionPartner {
        base: w_sub.clone(),
        pluri,
        eps,
        offset: eps * beta_max * ball_radius * ball_radius + 1e-12,
    }
}

fn sphere_point(rng: &mut SeedRng, n: usize, radius: f64, _tag: usize) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
        let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return z.iter().map(|c| c * (radius / norm)).collect();
        }
    }
}

/// Comparison principle on a certified pair: `w ≤ v` on the sampled
/// boundary of the ball implies `w ≤ v` at the sampled interior points.
pub fn comparison_check(
    w_sub: &QuadraticTestFn,
    v_super: &SupersolutionPartner,
    ball_radius: f64,
    interior_samples: usize,
    boundary_samples: usize,
    seed: u64,
) -> Result<ComparisonOutcome> {
    let n = w_sub.n;
    let margins = cone_margins(&w_sub.eigen[..n]);
    if margins.cone < -1e-10 || margins.subsolution < -1e-10 {
        return Err(Error::precondition(
            "comparison check needs an admissible subsolution".to_string(),
        ));
    }
    let mut rng = SeedRng::new(seed);
    for i in 0..boundary_samples {
        let z = sphere_point(&mut rng, n, ball_radius, i);
        if w_sub.eval(&z) > v_super.eval(&z) + 1e-12 {
            return Ok(ComparisonOutcome::SkippedBoundaryHypothesis);
        }
    }
    for _ in 0..interior_samples {
        let z: Vec<Complex64> = loop {
            let cand: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.range(-ball_radius, ball_radius), rng.range(-ball_radius, ball_radius)))
                .collect();
            let norm: f64 = cand.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < ball_radius {
                break cand;
            }
        };
        if w_sub.eval(&z) > v_super.eval(&z) + 1e-10 {
            return Ok(ComparisonOutcome::Violated);
        }
    }
    Ok(ComparisonOutcome::Holds)
}
