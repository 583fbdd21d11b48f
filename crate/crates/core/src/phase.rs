//! Central charge and phase bookkeeping.
//!
//! On the flat torus the central charge of `χ` shifted by `t` is
//! `Z(t) = ∫ det(χ(z) + (t + i) I) dV`. Its principal argument `θ̂(t)` sets
//! the target phase `θ(t) = nπ/2 − θ̂(t)` for the solver, and for admissible
//! data `θ̂(t)` must sit inside a bracket `(π − 2Ct, π − Ct)` for one
//! uniform constant `C`. This module computes `Z`, `θ̂`, fits the bracket
//! constant, and verifies the pointwise subsolution condition.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::cone::subsolution_margin_slice;
use crate::error::Error;
use crate::field::{complex_hessian, pointwise_eigs, HermitianField, ScalarField};
use crate::reduce;
use crate::Result;

/// Relative floor on `|Z|` below which the argument is meaningless.
pub const CHARGE_FLOOR: f64 = 1e-12;

/// One sample of the phase data at a parameter `t`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseSample {
    pub t: f64,
    pub z: Complex64,
    /// Principal argument of `z`, in `(−π, π]`.
    pub hat_theta: f64,
    /// Solver target `nπ/2 − hat_theta`.
    pub target_theta: f64,
}

/// Result of the bracket search.
#[derive(Clone, Copy, Debug)]
pub struct BracketFit {
    /// Constant realizing the bracket; `None` when there were no samples.
    pub c_fit: Option<f64>,
    pub t_range: (f64, f64),
    pub pass: bool,
}

/// Principal argument in `(−π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Distance between two angles on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// `Z(t) = ∫ det(χ + (t + i) I) dV` by direct per-point determinants and the
/// deterministic grid reduction.
pub fn central_charge(chi: &HermitianField, t: f64) -> Complex64 {
    let grid = chi.grid;
    let shift = Complex64::new(t, 1.0);
    let dets: Vec<Complex64> = (0..grid.npoints)
        .map(|p| chi.matrix_at(p).add_scalar_diag(shift).det())
        .collect();
    reduce::pairwise_sum_complex(&dets) * (grid.volume() / grid.npoints as f64)
}

/// `dZ/dt = ∫ det(M) tr(M⁻¹) dV` with `M = χ + (t + i) I`.
///
/// The imaginary part at `t = 0` is (up to a positive constant) the pairing
/// `Im ∫ (χ + iω)^{n−1} ∧ ω`, whose positivity the subsolution condition
/// forces.
pub fn charge_derivative(chi: &HermitianField, t: f64) -> Complex64 {
    let grid = chi.grid;
    let shift = Complex64::new(t, 1.0);
    let vals: Vec<Complex64> = (0..grid.npoints)
        .map(|p| {
            let m = chi.matrix_at(p).add_scalar_diag(shift);
            m.det() * m.inverse().trace()
        })
        .collect();
    reduce::pairwise_sum_complex(&vals) * (grid.volume() / grid.npoints as f64)
}

/// Phase sample at `t`; errors when `|Z|` falls below the relative floor.
pub fn hat_theta(chi: &HermitianField, t: f64) -> Result<PhaseSample> {
    let z = central_charge(chi, t);
    let floor = CHARGE_FLOOR * chi.grid.volume();
    if z.norm() <= floor {
        return Err(Error::VanishingCharge {
            modulus: z.norm(),
            floor,
        });
    }
    let hat = principal_arg(z);
    Ok(PhaseSample {
        t,
        z,
        hat_theta: hat,
        target_theta: chi.grid.n as f64 * PI / 2.0 - hat,
    })
}

/// Checks `θ̂(t) ∈ (π − 2Ct, π − Ct)` for a single constant `C` over all
/// samples.
///
/// Requires the critical normalization `θ̂(0) = π` to `1e−8`. The candidate
/// constants are the midpoint heuristic from the smallest sample followed by
/// a 200-point log grid over `[1e−4, 1e4]`; the first constant bracketing
/// every sample wins.
pub fn bracket_check(chi: &HermitianField, t_samples: &[f64]) -> Result<BracketFit> {
    let at_zero = hat_theta(chi, 0.0)?;
    if circle_distance(at_zero.hat_theta, PI) > 1e-8 {
        return Err(Error::precondition(format!(
            "bracket check needs hat_theta(0) = pi; got {:.12}",
            at_zero.hat_theta
        )));
    }
    if t_samples.is_empty() {
        return Ok(BracketFit {
            c_fit: None,
            t_range: (0.0, 0.0),
            pass: true,
        });
    }
    let mut ts = t_samples.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if ts[0] <= 0.0 {
        return Err(Error::domain("bracket samples must be positive"));
    }
    let hats: Vec<f64> = ts
        .iter()
        .map(|&t| hat_theta(chi, t).map(|s| s.hat_theta))
        .collect::<Result<_>>()?;
    let admissible = |c: f64| -> bool {
        ts.iter()
            .zip(hats.iter())
            .all(|(&t, &h)| PI - 2.0 * c * t < h && h < PI - c * t)
    };
    // Midpoint heuristic from the smallest sample, then the log grid.
    let heuristic = (PI - hats[0]) / ts[0] * (2.0 / 3.0);
    let mut c_found = None;
    if heuristic > 0.0 && admissible(heuristic) {
        c_found = Some(heuristic);
    } else {
        for i in 0..200 {
            let c = 10f64.powf(-4.0 + 8.0 * i as f64 / 199.0);
            if admissible(c) {
                c_found = Some(c);
                break;
            }
        }
    }
    Ok(BracketFit {
        c_fit: c_found,
        t_range: (ts[0], ts[ts.len() - 1]),
        pass: c_found.is_some(),
    })
}

/// Pointwise subsolution check for `ū`: at every grid point,
/// `min_j Σ_{i≠j} arctan λ_i(χ_ū + tI) > θ_t − π/2`.
///
/// Returns the pass flag and the worst margin
/// `min_z [A(λ(z)) − (θ_t − π/2)]`.
pub fn subsolution_verify(
    chi: &HermitianField,
    u_bar: &ScalarField,
    t: f64,
    theta_t: f64,
) -> Result<(bool, f64)> {
    if u_bar.grid != chi.grid {
        return Err(Error::domain("subsolution field grid mismatch"));
    }
    let mut w = if u_bar.sup_abs() == 0.0 {
        chi.clone()
    } else {
        chi.add(&complex_hessian(u_bar))?
    };
    w.add_scalar_diag(t);
    let eigs = pointwise_eigs(&w);
    let threshold = theta_t - PI / 2.0;
    let worst = eigs.min_over_points(|lam| subsolution_margin_slice(lam) - threshold);
    Ok((worst > 0.0, worst))
}
