//! End-to-end experiments for the two Hessian corollaries: build an
//! admissible `χ` whose integral conditions hold exactly after an algebraic
//! rescaling, run the continuity path, and verify the σ-form equations and
//! the necessity inequalities.
//!
//! 3D: `σ₂(χ_u) = 1` with `χ_u ∈ Γ₂`, from `χ∧ω > 0` and
//! `3∫χ²∧ω = ∫ω³`, `∫χ³ < 3∫χ∧ω²`.
//! 4D: `σ₃(χ_u) = σ₁(χ_u)` with `χ_u ∈ Γ₃`, from `3χ²∧ω − ω³ > 0`,
//! `∫χ³∧ω = ∫χ∧ω³`, `∫χ∧ω³ > 0`, `Re ∫(χ+iω)⁴ < 0`.
//!
//! Necessity margins are evaluated on critically projected spectra: each
//! grid tuple is shifted along the diagonal until its angle sum sits exactly
//! at `(n−2)π/2`, which subtracts the O(t) continuation offset from the
//! reported margins. The raw σ-form residual is reported separately.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cone::sigma_all;
use crate::continuation::{self, ContinuityTrace, PathOptions, Schedule};
use crate::error::Error;
use crate::field::{
    build_chi, complex_hessian, pointwise_eigs, trig_field, EigenField, HermitianField,
    ScalarField, TorusGrid, TrigMode,
};
use crate::herm::CMat;
use crate::phase;
use crate::sampling::{self, SeedRng};
use crate::solver::{self, SolverOptions};
use crate::Result;

/// One named check with its witness value (margin or gap).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
    pub value: f64,
}

impl NamedCheck {
    fn new(name: &str, pass: bool, value: f64) -> Self {
        NamedCheck {
            name: name.to_string(),
            pass,
            value,
        }
    }
}

/// Suite configuration; defaults follow the pinned desk-scale runs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub perturbation_scale: f64,
    pub points_per_axis: usize,
    pub schedule: Schedule,
    pub tol_sigma: f64,
    #[serde(skip, default)]
    pub solver: SolverOptions,
}

impl SuiteConfig {
    pub fn default_3d() -> Self {
        SuiteConfig {
            seed: 1,
            perturbation_scale: 0.05,
            points_per_axis: 8,
            schedule: Schedule {
                t0: 0.2,
                ratio: 0.5,
                t_min: 1e-3,
            },
            tol_sigma: 5e-3,
            solver: SolverOptions::default(),
        }
    }

    pub fn default_4d() -> Self {
        SuiteConfig {
            seed: 1,
            perturbation_scale: 0.05,
            points_per_axis: 4,
            schedule: Schedule {
                t0: 0.2,
                ratio: 0.5,
                t_min: 2e-3,
            },
            tol_sigma: 1e-2,
            solver: SolverOptions::default(),
        }
    }
}

/// Full result of one suite run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub dimension: usize,
    pub seed: u64,
    pub perturbation_scale: f64,
    pub points_per_axis: usize,
    /// Rescaling factor applied by the builder.
    pub scale_factor: f64,
    pub preconditions: Vec<NamedCheck>,
    pub rows_total: usize,
    pub rows_converged: usize,
    pub bracket_c: Option<f64>,
    pub bracket_pass: bool,
    /// `max_rows |c_solved − θ(t)|`.
    pub c_gap_max: f64,
    pub hmw_max_ratio: f64,
    pub hmw_pass: bool,
    /// θ̂ strictly increases toward π as t decreases along the trace.
    pub hat_theta_monotone: bool,
    /// sup|u| on the first converged row and its maximum along the path
    /// (the C⁰-boundedness witness).
    pub sup_u_first: f64,
    pub sup_u_max: f64,
    pub critical_theta_residual: f64,
    pub critical_sigma_residual: f64,
    pub sigma_tolerance: f64,
    /// max over converged states of the normalized differentiated-equation
    /// residual.
    pub differentiate1_max: f64,
    /// Worst `Γ_{n−1}`-margin of `χ_u` over the grid.
    pub cone_membership_margin: f64,
    pub necessity: Vec<NamedCheck>,
    pub pass: bool,
}

fn sigma_integral(eigs: &EigenField, k: usize) -> f64 {
    let values: Vec<f64> = (0..eigs.grid.npoints)
        .map(|p| sigma_all(eigs.point(p))[k])
        .collect();
    let field = ScalarField {
        grid: eigs.grid,
        values,
    };
    crate::field::integrate(&field)
}

/// σ₂ of the tuple with index `omit` removed.
fn sigma2_omitting(lam: &[f64], omit: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..lam.len() {
        if i == omit {
            continue;
        }
        for j in i + 1..lam.len() {
            if j != omit {
                acc += lam[i] * lam[j];
            }
        }
    }
    acc
}

/// Shifts a spectrum along the diagonal until `θ(λ + s·1)` equals the
/// critical value; θ is strictly increasing in the shift, so Newton is
/// globally safe here.
fn project_to_critical(lam: &[f64], critical: f64) -> Option<(Vec<f64>, f64)> {
    let mut s = 0.0f64;
    for _ in 0..60 {
        let theta: f64 = lam.iter().map(|l| (l + s).atan()).sum();
        let gap = theta - critical;
        if gap.abs() < 1e-14 {
            return Some((lam.iter().map(|l| l + s).collect(), s));
        }
        let slope: f64 = lam.iter().map(|l| 1.0 / (1.0 + (l + s) * (l + s))).sum();
        s -= gap / slope;
    }
    None
}

fn seeded_perturbation(grid: TorusGrid, rng: &mut SeedRng, scale: f64) -> Result<ScalarField> {
    let axes = grid.axes();
    let modes: Vec<TrigMode> = (0..3)
        .map(|_| {
            let mut wave = vec![0i64; axes];
            let a = rng.index(axes);
            wave[a] = if rng.uniform() < 0.5 { 1 } else { -1 };
            if rng.uniform() < 0.6 {
                let b = rng.index(axes);
                if b != a {
                    wave[b] = 1;
                }
            }
            TrigMode {
                wave,
                amplitude: scale * rng.range(0.5, 1.0),
                phase: rng.range(0.0, 2.0 * PI),
            }
        })
        .collect();
    trig_field(grid, &modes)
}

/// 3D builder: seeded unitary conjugation of `diag(1,1,0)` plus `i∂∂̄ρ`,
/// rescaled so `∫σ₂ dV = (2π)⁶` exactly. Verifies `χ∧ω > 0` pointwise
/// (all eigenvalue pair sums positive) and `∫σ₃ < ∫σ₁`.
pub fn build_3d_example(
    grid: TorusGrid,
    seed: u64,
    perturbation_scale: f64,
) -> Result<(HermitianField, f64)> {
    if grid.n != 3 {
        return Err(Error::domain("3D builder needs a complex-dimension-3 grid"));
    }
    let mut rng = SeedRng::new(seed);
    let u = sampling::unitary(&mut rng, 3);
    let c0 = CMat::from_fn(3, |i, j| {
        if i == j && i < 2 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let c = c0.conjugate_by(&u).hermitize();
    let rho = seeded_perturbation(grid, &mut rng, perturbation_scale)?;
    let mut chi = build_chi(grid, &c, &rho)?;

    let eigs = pointwise_eigs(&chi);
    let i2 = sigma_integral(&eigs, 2);
    if i2 <= 0.0 {
        return Err(Error::precondition(
            "3d build: integral of sigma_2 is not positive".to_string(),
        ));
    }
    let s = (grid.volume() / i2).sqrt();
    chi.scale(s);

    let eigs = pointwise_eigs(&chi);
    // χ∧ω > 0 pointwise: smallest pair sum is the sum of the two smallest
    let pair_min = eigs.min_over_points(|lam| lam[1] + lam[2]);
    if pair_min <= 0.0 {
        return Err(Error::precondition(format!(
            "3d build: chi wedge omega positivity fails (worst pair sum {pair_min:.3e})"
        )));
    }
    let i3 = sigma_integral(&eigs, 3);
    let i1 = sigma_integral(&eigs, 1);
    if i3 >= i1 {
        return Err(Error::precondition(format!(
            "3d build: cubic inequality fails ({i3:.6e} >= {i1:.6e})"
        )));
    }
    let gap = (sigma_integral(&eigs, 2) - grid.volume()).abs() / grid.volume();
    if gap > 1e-12 {
        return Err(Error::precondition(format!(
            "3d build: scaling not exact (relative gap {gap:.3e})"
        )));
    }
    Ok((chi, s))
}

/// 4D builder: perturbed identity, rescaled so `∫σ₃ dV = ∫σ₁ dV` exactly.
/// Verifies `σ₂(λ|j) > 1` for every omitted index pointwise, `∫σ₁ > 0`, and
/// `Re Z(0) < 0`.
pub fn build_4d_example(
    grid: TorusGrid,
    seed: u64,
    perturbation_scale: f64,
) -> Result<(HermitianField, f64)> {
    if grid.n != 4 {
        return Err(Error::domain("4D builder needs a complex-dimension-4 grid"));
    }
    let mut rng = SeedRng::new(seed);
    let h = sampling::hermitian(&mut rng, 4, 0.5 * perturbation_scale);
    let c = CMat::identity(4).add(&h).hermitize();
    let rho = seeded_perturbation(grid, &mut rng, 0.5 * perturbation_scale)?;
    let chi0 = build_chi(grid, &c, &rho)?;
    let (chi, s) = scale_to_cubic_linear_equality(chi0)?;

    let eigs = pointwise_eigs(&chi);
    let omit_margin = eigs.min_over_points(|lam| {
        (0..4)
            .map(|j| sigma2_omitting(lam, j) - 1.0)
            .fold(f64::INFINITY, f64::min)
    });
    if omit_margin <= 0.0 {
        return Err(Error::precondition(format!(
            "4d build: 3chi^2 wedge omega - omega^3 positivity fails (worst margin {omit_margin:.3e})"
        )));
    }
    let i1 = sigma_integral(&eigs, 1);
    if i1 <= 0.0 {
        return Err(Error::precondition(
            "4d build: integral of sigma_1 is not positive".to_string(),
        ));
    }
    let re_z = phase::central_charge(&chi, 0.0).re;
    if re_z >= 0.0 {
        return Err(Error::precondition(format!(
            "4d build: Re Z(0) = {re_z:.6e} is not negative"
        )));
    }
    Ok((chi, s))
}

/// Rescales `χ ← s·χ` with `s = sqrt(∫σ₁ / ∫σ₃)` so the cubic–linear
/// integral equality holds exactly; both integrals must share a sign.
pub fn scale_to_cubic_linear_equality(mut chi: HermitianField) -> Result<(HermitianField, f64)> {
    let eigs = pointwise_eigs(&chi);
    let i1 = sigma_integral(&eigs, 1);
    let i3 = sigma_integral(&eigs, 3);
    if i1 * i3 <= 0.0 {
        return Err(Error::precondition(format!(
            "cubic-linear scaling: sign mismatch (sigma_1 integral {i1:.4e}, sigma_3 integral {i3:.4e})"
        )));
    }
    let s = (i1 / i3).sqrt();
    chi.scale(s);
    let eigs = pointwise_eigs(&chi);
    let gap = (sigma_integral(&eigs, 3) - sigma_integral(&eigs, 1)).abs()
        / sigma_integral(&eigs, 1).abs().max(1.0);
    if gap > 1e-12 {
        return Err(Error::precondition(format!(
            "cubic-linear scaling not exact (relative gap {gap:.3e})"
        )));
    }
    Ok((chi, s))
}

struct PathSummary {
    rows_total: usize,
    rows_converged: usize,
    bracket_c: Option<f64>,
    bracket_pass: bool,
    c_gap_max: f64,
    hmw_max_ratio: f64,
    hmw_pass: bool,
    hat_theta_monotone: bool,
    sup_u_first: f64,
    sup_u_max: f64,
    differentiate1_max: f64,
    trace: ContinuityTrace,
}

fn run_and_summarize(chi: &HermitianField, config: &SuiteConfig) -> Result<PathSummary> {
    let bracket = phase::bracket_check(chi, &config.schedule.parameters())?;
    let opts = PathOptions {
        solver: config.solver,
        keep_states: true,
    };
    let trace = continuation::run_path(chi, &config.schedule, &opts)?;
    let rows_total = trace.rows.len();
    let rows_converged = trace.rows.iter().filter(|r| r.converged).count();
    let c_gap_max = trace
        .rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| (r.c_solved - r.target_theta).abs())
        .fold(0.0f64, f64::max);
    let (hmw_max_ratio, hmw_pass) = continuation::hmw_trace_check(&trace, None)?;
    let hat_theta_monotone = trace
        .rows
        .iter()
        .filter(|r| r.converged)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1].hat_theta > w[0].hat_theta);
    let sup_u_first = trace
        .rows
        .iter()
        .find(|r| r.converged)
        .map(|r| r.sup_u)
        .unwrap_or(f64::NAN);
    let sup_u_max = trace
        .rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| r.sup_u)
        .fold(0.0f64, f64::max);
    let mut differentiate1_max = 0.0f64;
    for state in &trace.states {
        let rep = solver::differentiate1_check(state)?;
        differentiate1_max = differentiate1_max.max(rep.normalized());
    }
    Ok(PathSummary {
        rows_total,
        rows_converged,
        bracket_c: bracket.c_fit,
        bracket_pass: bracket.pass,
        c_gap_max,
        hmw_max_ratio,
        hmw_pass,
        hat_theta_monotone,
        sup_u_first,
        sup_u_max,
        differentiate1_max,
        trace,
    })
}

/// Runs the continuity path on a built 3D example and verifies
/// `σ₂(χ_u) = 1` with its necessity inequalities.
pub fn verify_3d(chi: &HermitianField, scale_factor: f64, config: &SuiteConfig) -> Result<SuiteReport> {
    let grid = chi.grid;
    let eigs = pointwise_eigs(chi);
    let mut preconditions = Vec::new();
    let pair_min = eigs.min_over_points(|lam| lam[1] + lam[2]);
    preconditions.push(NamedCheck::new("chi_wedge_omega_positive", pair_min > 0.0, pair_min));
    let vol_gap = (sigma_integral(&eigs, 2) - grid.volume()).abs() / grid.volume();
    preconditions.push(NamedCheck::new(
        "sigma2_volume_equality",
        vol_gap <= 1e-12,
        vol_gap,
    ));
    let cubic_gap = sigma_integral(&eigs, 1) - sigma_integral(&eigs, 3);
    preconditions.push(NamedCheck::new(
        "cubic_inequality",
        cubic_gap > 0.0,
        cubic_gap,
    ));
    let hat0 = phase::hat_theta(chi, 0.0)?;
    let hat_gap = phase::circle_distance(hat0.hat_theta, PI);
    preconditions.push(NamedCheck::new("critical_normalization", hat_gap <= 1e-6, hat_gap));
    let sub_margin = continuation::path_subsolution_margin(chi, &config.schedule)?;
    preconditions.push(NamedCheck::new(
        "subsolution_along_path",
        sub_margin > 0.0,
        sub_margin,
    ));
    if preconditions.iter().any(|c| !c.pass) {
        return Err(Error::precondition(format!(
            "3d suite preconditions failed: {:?}",
            preconditions
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.clone())
                .collect::<Vec<_>>()
        )));
    }

    let summary = run_and_summarize(chi, config)?;
    let state = summary
        .trace
        .final_state
        .as_ref()
        .ok_or_else(|| Error::domain("3d suite: no converged state"))?;
    let (theta_res, sigma_res) = continuation::critical_residual(chi, state)?;

    let chi_u = chi.add(&complex_hessian(&state.u))?;
    let final_eigs = pointwise_eigs(&chi_u);
    let cone_margin = final_eigs.min_over_points(|lam| {
        let sig = sigma_all(lam);
        sig[1].min(sig[2])
    });

    let mut necessity = Vec::new();
    // pointwise σ₃ ≤ (1/9)σ₁σ₂ on the solution
    let maclaurin_margin = final_eigs.min_over_points(|lam| {
        let sig = sigma_all(lam);
        sig[1] * sig[2] / 9.0 - sig[3]
    });
    necessity.push(NamedCheck::new(
        "pointwise_sigma3_le_sigma1_sigma2_over_9",
        maclaurin_margin >= -1e-10,
        maclaurin_margin,
    ));
    // integral condition re-check on χ
    necessity.push(NamedCheck::new(
        "integral_cubic_lt_linear",
        cubic_gap > 0.0,
        cubic_gap,
    ));

    let pass = summary.rows_converged == summary.rows_total
        && summary.bracket_pass
        && summary.hat_theta_monotone
        && summary.c_gap_max <= 1e-3
        && summary.hmw_pass
        && summary.differentiate1_max <= 1e-6
        && sigma_res <= config.tol_sigma
        && theta_res <= 5.0 * config.tol_sigma
        && cone_margin > 0.0
        && necessity.iter().all(|c| c.pass);

    Ok(SuiteReport {
        dimension: 3,
        seed: config.seed,
        perturbation_scale: config.perturbation_scale,
        points_per_axis: grid.points_per_axis,
        scale_factor,
        preconditions,
        rows_total: summary.rows_total,
        rows_converged: summary.rows_converged,
        bracket_c: summary.bracket_c,
        bracket_pass: summary.bracket_pass,
        c_gap_max: summary.c_gap_max,
        hmw_max_ratio: summary.hmw_max_ratio,
        hmw_pass: summary.hmw_pass,
        hat_theta_monotone: summary.hat_theta_monotone,
        sup_u_first: summary.sup_u_first,
        sup_u_max: summary.sup_u_max,
        critical_theta_residual: theta_res,
        critical_sigma_residual: sigma_res,
        sigma_tolerance: config.tol_sigma,
        differentiate1_max: summary.differentiate1_max,
        cone_membership_margin: cone_margin,
        necessity,
        pass,
    })
}

/// Runs the continuity path on a built 4D example and verifies
/// `σ₃(χ_u) = σ₁(χ_u)` with its necessity inequalities (evaluated on the
/// critically projected spectra).
pub fn verify_4d(chi: &HermitianField, scale_factor: f64, config: &SuiteConfig) -> Result<SuiteReport> {
    let grid = chi.grid;
    let eigs = pointwise_eigs(chi);
    let mut preconditions = Vec::new();
    let omit_margin = eigs.min_over_points(|lam| {
        (0..4)
            .map(|j| sigma2_omitting(lam, j) - 1.0)
            .fold(f64::INFINITY, f64::min)
    });
    preconditions.push(NamedCheck::new(
        "form_positivity_sigma2_omit_gt_1",
        omit_margin > 0.0,
        omit_margin,
    ));
    let i1 = sigma_integral(&eigs, 1);
    let i3 = sigma_integral(&eigs, 3);
    let eq_gap = (i3 - i1).abs() / i1.abs().max(1.0);
    preconditions.push(NamedCheck::new(
        "cubic_linear_integral_equality",
        eq_gap <= 1e-12,
        eq_gap,
    ));
    preconditions.push(NamedCheck::new("linear_integral_positive", i1 > 0.0, i1));
    let re_z = phase::central_charge(chi, 0.0).re;
    preconditions.push(NamedCheck::new("re_charge_negative", re_z < 0.0, re_z));
    let hat0 = phase::hat_theta(chi, 0.0)?;
    let hat_gap = phase::circle_distance(hat0.hat_theta, PI);
    preconditions.push(NamedCheck::new("critical_normalization", hat_gap <= 1e-6, hat_gap));
    let sub_margin = continuation::path_subsolution_margin(chi, &config.schedule)?;
    preconditions.push(NamedCheck::new(
        "subsolution_along_path",
        sub_margin > 0.0,
        sub_margin,
    ));
    if preconditions.iter().any(|c| !c.pass) {
        return Err(Error::precondition(format!(
            "4d suite preconditions failed: {:?}",
            preconditions
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.clone())
                .collect::<Vec<_>>()
        )));
    }

    let summary = run_and_summarize(chi, config)?;
    let state = summary
        .trace
        .final_state
        .as_ref()
        .ok_or_else(|| Error::domain("4d suite: no converged state"))?;
    let (theta_res, sigma_res) = continuation::critical_residual(chi, state)?;

    let chi_u = chi.add(&complex_hessian(&state.u))?;
    let final_eigs = pointwise_eigs(&chi_u);
    let cone_margin = final_eigs.min_over_points(|lam| {
        let sig = sigma_all(lam);
        sig[1].min(sig[2]).min(sig[3])
    });

    // necessity margins on the critically projected spectra
    let critical = PI;
    let mut sigma2_min = f64::INFINITY;
    let mut sigma2_omit_min = f64::INFINITY;
    let mut quartic_max = f64::NEG_INFINITY;
    let mut shift_max = 0.0f64;
    let mut raw_maclaurin_min = f64::INFINITY;
    for p in 0..grid.npoints {
        let lam = final_eigs.point(p);
        let sig_raw = sigma_all(lam);
        raw_maclaurin_min = raw_maclaurin_min.min(sig_raw[1] * sig_raw[2] - 6.0 * sig_raw[3]);
        let (proj, shift) = project_to_critical(lam, critical)
            .ok_or_else(|| Error::domain("critical projection did not converge"))?;
        shift_max = shift_max.max(shift.abs());
        let sig = sigma_all(&proj);
        sigma2_min = sigma2_min.min(sig[2]);
        sigma2_omit_min = sigma2_omit_min.min(sigma2_omitting(&proj, 3));
        quartic_max = quartic_max.max(sig[4] - sig[2] + 1.0);
    }
    let mut necessity = Vec::new();
    necessity.push(NamedCheck::new(
        "sigma2_ge_6",
        sigma2_min >= 6.0 - 1e-8,
        sigma2_min,
    ));
    necessity.push(NamedCheck::new(
        "sigma2_omit_smallest_ge_3",
        sigma2_omit_min >= 3.0 - 1e-8,
        sigma2_omit_min,
    ));
    necessity.push(NamedCheck::new(
        "quartic_re_part_le_minus_2",
        quartic_max <= -2.0 + 1e-8,
        quartic_max,
    ));
    necessity.push(NamedCheck::new(
        "raw_maclaurin_sigma1_sigma2_ge_6_sigma3",
        raw_maclaurin_min >= -1e-10,
        raw_maclaurin_min,
    ));
    necessity.push(NamedCheck::new(
        "critical_projection_max_shift",
        true,
        shift_max,
    ));
    // integral re-checks of the three condition-(i) statements
    necessity.push(NamedCheck::new(
        "integral_equality_recheck",
        eq_gap <= 1e-12,
        eq_gap,
    ));
    necessity.push(NamedCheck::new("integral_linear_positive_recheck", i1 > 0.0, i1));
    necessity.push(NamedCheck::new("re_charge_negative_recheck", re_z < 0.0, re_z));

    let pass = summary.rows_converged == summary.rows_total
        && summary.bracket_pass
        && summary.hat_theta_monotone
        && summary.c_gap_max <= 1e-3
        && summary.hmw_pass
        && summary.differentiate1_max <= 1e-6
        && sigma_res <= config.tol_sigma
        && theta_res <= 5.0 * config.tol_sigma
        && cone_margin > 0.0
        && necessity.iter().all(|c| c.pass);

    Ok(SuiteReport {
        dimension: 4,
        seed: config.seed,
        perturbation_scale: config.perturbation_scale,
        points_per_axis: grid.points_per_axis,
        scale_factor,
        preconditions,
        rows_total: summary.rows_total,
        rows_converged: summary.rows_converged,
        bracket_c: summary.bracket_c,
        bracket_pass: summary.bracket_pass,
        c_gap_max: summary.c_gap_max,
        hmw_max_ratio: summary.hmw_max_ratio,
        hmw_pass: summary.hmw_pass,
        hat_theta_monotone: summary.hat_theta_monotone,
        sup_u_first: summary.sup_u_first,
        sup_u_max: summary.sup_u_max,
        critical_theta_residual: theta_res,
        critical_sigma_residual: sigma_res,
        sigma_tolerance: config.tol_sigma,
        differentiate1_max: summary.differentiate1_max,
        cone_membership_margin: cone_margin,
        necessity,
        pass,
    })
}

/// Builds and verifies the 3D suite in one call.
pub fn run_suite_3d(config: &SuiteConfig) -> Result<SuiteReport> {
    let grid = TorusGrid::new(3, config.points_per_axis)?;
    let (chi, s) = build_3d_example(grid, config.seed, config.perturbation_scale)?;
    verify_3d(&chi, s, config)
}

/// Builds and verifies the 4D suite in one call.
pub fn run_suite_4d(config: &SuiteConfig) -> Result<SuiteReport> {
    let grid = TorusGrid::new(4, config.points_per_axis)?;
    let (chi, s) = build_4d_example(grid, config.seed, config.perturbation_scale)?;
    verify_4d(&chi, s, config)
}
