//! Damped Newton solver for one member of the continuity family
//! `θ_ω(χ + tω + i∂∂̄u) = c`.
//!
//! The discrete unknowns are the mean-zero potential `u` together with the
//! free phase constant `c` (bordered system); the linearization is
//! `L(v) = tr(F · i∂∂̄v)` with `F = (w² + I)⁻¹`, solved matrix-free by
//! restarted GMRES with the constant-coefficient spectral inverse as
//! preconditioner. A backtracking line search guards the supercritical
//! branch `θ(λ(w)) > (n−2)π/2` at every accepted step.

pub mod gmres;

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::Error;
use crate::field::{
    self, complex_gradient, complex_hessian, fft, pointwise_eigs, unpack_point, EigenField,
    HermitianField, ScalarField, TorusGrid,
};
use crate::herm::CMat;
use crate::reduce;
use crate::Result;

/// Solver configuration. Defaults follow the pinned tolerances.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Convergence threshold on `sup |residual|`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Branch safeguard slack in radians above `(n−2)π/2`.
    pub branch_slack: f64,
    /// Armijo constant for the sup-norm merit decrease.
    pub armijo: f64,
    pub krylov_restart: usize,
    pub krylov_max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            max_iterations: 50,
            branch_slack: 1e-3,
            armijo: 1e-4,
            krylov_restart: 30,
            krylov_max_iters: 400,
        }
    }
}

/// Phase target: the free constant solved jointly with `u` (the default),
/// or a prescribed field (manufactured-solution mode, off the default path).
#[derive(Clone, Debug)]
pub enum PhaseTarget {
    Constant,
    Field(ScalarField),
}

/// Converged (or final) state of one Newton solve.
#[derive(Clone, Debug)]
pub struct SolverState {
    /// Mean-zero potential.
    pub u: ScalarField,
    /// Solved phase constant (mean of the target field in field mode).
    pub c: f64,
    pub t: f64,
    /// `w = χ + tI + i∂∂̄u`.
    pub w: HermitianField,
    /// `θ(λ(w)) − c` (or minus the target field).
    pub residual: ScalarField,
    pub iterations: usize,
    pub converged: bool,
    /// `sup |residual|` after each iteration, starting with the initial one.
    pub history: Vec<f64>,
}

/// Linearized coefficient field `F = (w² + I)⁻¹`.
#[derive(Clone, Debug)]
pub struct LinearizedCoefficients {
    pub f: HermitianField,
}

/// Monitor record: the quantities the a priori estimates bound.
#[derive(Clone, Copy, Debug)]
pub struct Monitors {
    pub sup_u: f64,
    pub sup_grad: f64,
    /// Largest `|eigenvalue|` of `i∂∂̄u` over the grid.
    pub sup_hess: f64,
    /// `sup|i∂∂̄u| / (1 + sup|∇u|²)`.
    pub hmw_ratio: f64,
}

/// Result of the differentiated-equation consistency check.
#[derive(Clone, Copy, Debug)]
pub struct Differentiate1Report {
    /// `sup_{z,p} |tr(F ∂_p w)|`.
    pub sup_identity: f64,
    /// `sup_{z,p} |∂_p w|` entrywise, for normalization.
    pub sup_w_derivative: f64,
}

impl Differentiate1Report {
    pub fn normalized(&self) -> f64 {
        self.sup_identity / (1.0 + self.sup_w_derivative)
    }
}

/// `w = χ + tI + i∂∂̄u`.
pub fn assemble_w(chi: &HermitianField, u: &ScalarField, t: f64) -> Result<HermitianField> {
    if u.grid != chi.grid {
        return Err(Error::domain("potential grid does not match chi"));
    }
    let mut w = if u.sup_abs() == 0.0 {
        chi.clone()
    } else {
        chi.add(&complex_hessian(u))?
    };
    w.add_scalar_diag(t);
    Ok(w)
}

fn theta_of_eigs(eigs: &EigenField) -> ScalarField {
    let n = eigs.grid.n;
    let values: Vec<f64> = eigs
        .data
        .par_chunks(n)
        .map(|lam| lam.iter().map(|l| l.atan()).sum())
        .collect();
    ScalarField {
        grid: eigs.grid,
        values,
    }
}

/// Pointwise residual `θ(λ(χ + tI + i∂∂̄u)) − c`.
pub fn residual(chi: &HermitianField, u: &ScalarField, c: f64, t: f64) -> Result<ScalarField> {
    let w = assemble_w(chi, u, t)?;
    let theta = theta_of_eigs(&pointwise_eigs(&w));
    Ok(ScalarField {
        grid: theta.grid,
        values: theta.values.par_iter().map(|v| v - c).collect(),
    })
}

/// `F = (w² + I)⁻¹` per point, re-Hermitized into packed storage.
pub fn linear_coefficients(w: &HermitianField) -> LinearizedCoefficients {
    let grid = w.grid;
    let n = grid.n;
    let e = HermitianField::entries_per_point(n);
    let mut f = HermitianField::zeros(grid);
    f.data
        .par_chunks_mut(e)
        .zip(w.data.par_chunks(e))
        .for_each(|(out, point)| {
            let m = unpack_point(n, point);
            let shifted = m.mul(&m).add_scalar_diag(Complex64::new(1.0, 0.0));
            let inv = shifted.inverse().hermitize();
            field::pack_point(n, &inv, out);
        });
    LinearizedCoefficients { f }
}

/// Packed-point contraction `tr(F(z) · H(z))` for two Hermitian points.
#[inline]
fn contract_packed(n: usize, f: &[f64], h: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        acc += f[i] * h[i];
    }
    for s in (n..n * n).step_by(2) {
        acc += 2.0 * (f[s] * h[s] + f[s + 1] * h[s + 1]);
    }
    acc
}

/// `L(v) = tr(F · i∂∂̄v)` pointwise (matrix-free linearized operator).
pub fn apply_linearized(coeffs: &LinearizedCoefficients, v: &ScalarField) -> Result<ScalarField> {
    let grid = coeffs.f.grid;
    if v.grid != grid {
        return Err(Error::domain("linearized operator grid mismatch"));
    }
    let hess = complex_hessian(v);
    let n = grid.n;
    let e = HermitianField::entries_per_point(n);
    let values: Vec<f64> = coeffs
        .f
        .data
        .par_chunks(e)
        .zip(hess.data.par_chunks(e))
        .map(|(f, h)| contract_packed(n, f, h))
        .collect();
    Ok(ScalarField { grid, values })
}

/// Fourier symbol of the constant-coefficient operator `v ↦ tr(F̄ · i∂∂̄v)`,
/// tabulated per mode. Strictly negative away from the zero mode.
fn constant_symbol_table(grid: &TorusGrid, fbar: &CMat) -> Vec<f64> {
    let n = grid.n;
    let n_axis = grid.points_per_axis as i64;
    let mut table = vec![0.0f64; grid.npoints];
    fft::for_each_mode(grid, |p, freq| {
        let mut s = 0.0;
        for i in 0..n {
            s += fbar.a[i][i].re * field::hessian_symbol(freq, n_axis, i, i).re;
        }
        for i in 0..n {
            for j in i + 1..n {
                let m = field::hessian_symbol(freq, n_axis, i, j);
                s += 2.0 * (fbar.a[i][j].conj() * m).re;
            }
        }
        table[p] = s;
    });
    table
}

/// Bordered Newton direction: solves
/// `L(δu) − δc = rhs_field`, `mean(δu) = 0`
/// by GMRES preconditioned with the exact constant-coefficient inverse.
fn solve_direction(
    coeffs: &LinearizedCoefficients,
    rhs_field: &ScalarField,
    rel_tol: f64,
    opts: &SolverOptions,
) -> (ScalarField, f64, usize) {
    let grid = coeffs.f.grid;
    let npoints = grid.npoints;
    let fbar = coeffs.f.mean_matrix();
    let symbol = constant_symbol_table(&grid, &fbar);

    let apply = |x: &[f64]| -> Vec<f64> {
        let (du, dc) = (&x[..npoints], x[npoints]);
        let field = ScalarField {
            grid,
            values: du.to_vec(),
        };
        let lv = apply_linearized(coeffs, &field).expect("grids match");
        let mut out = Vec::with_capacity(npoints + 1);
        out.extend(lv.values.iter().map(|v| v - dc));
        out.push(reduce::pairwise_sum(du) / npoints as f64);
        out
    };
    let precond = |r: &[f64]| -> Vec<f64> {
        let (rf, rmean) = (&r[..npoints], r[npoints]);
        let mut spec: Vec<Complex64> = rf.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&grid, &mut spec);
        let dc = -spec[0].re / npoints as f64;
        spec[0] = Complex64::ZERO;
        for (s, sym) in spec.iter_mut().zip(symbol.iter()).skip(1) {
            *s /= *sym;
        }
        fft::inverse(&grid, &mut spec);
        let mut out = Vec::with_capacity(npoints + 1);
        out.extend(spec.iter().map(|c| c.re + rmean));
        out.push(dc);
        out
    };

    let mut b = Vec::with_capacity(npoints + 1);
    b.extend_from_slice(&rhs_field.values);
    b.push(0.0);
    let out = gmres::gmres(
        apply,
        precond,
        &b,
        rel_tol,
        opts.krylov_restart,
        opts.krylov_max_iters,
    );
    let du = ScalarField {
        grid,
        values: out.solution[..npoints].to_vec(),
    };
    (du, out.solution[npoints], out.iterations)
}

/// Minimum over the grid of `θ(λ) − (n−2)π/2` and of the `Γ_{n−1}` margins.
fn branch_margins(eigs: &EigenField) -> (f64, f64) {
    let n = eigs.grid.n;
    let critical = (n as f64 - 2.0) * PI / 2.0;
    let theta_min = eigs.min_over_points(|lam| lam.iter().map(|l| l.atan()).sum::<f64>()) - critical;
    let cone_min = eigs.min_over_points(|lam| {
        let sig = crate::cone::sigma_all(lam);
        sig[1..n].iter().cloned().fold(f64::INFINITY, f64::min)
    });
    (theta_min, cone_min)
}

/// Damped Newton solve of `θ_ω(χ + tω + i∂∂̄u) = c` from the initial guess
/// `u0`.
///
/// In [`PhaseTarget::Constant`] mode `c` is a free unknown initialized to
/// the grid mean of `θ(λ(w(u0)))`; in field mode the prescribed target is
/// held fixed and the bordered constant only absorbs the inconsistent
/// component of intermediate Newton systems.
pub fn newton_solve(
    chi: &HermitianField,
    t: f64,
    u0: &ScalarField,
    target: &PhaseTarget,
    opts: &SolverOptions,
) -> Result<SolverState> {
    let grid = chi.grid;
    if let PhaseTarget::Field(f) = target {
        if f.grid != grid {
            return Err(Error::domain("phase target grid mismatch"));
        }
    }
    let mut u = u0.clone();
    u.remove_mean();
    let mut w = assemble_w(chi, &u, t)?;
    let eigs = pointwise_eigs(&w);
    let (theta_min, cone_min) = branch_margins(&eigs);
    if theta_min <= opts.branch_slack {
        return Err(Error::precondition(format!(
            "initial guess leaves the supercritical branch: min theta excess {theta_min:.3e} <= slack {:.3e}",
            opts.branch_slack
        )));
    }
    if cone_min <= 0.0 {
        return Err(Error::precondition(
            "initial guess violates the Gamma_{n-1} cone".to_string(),
        ));
    }
    let theta = theta_of_eigs(&eigs);
    let mut c = match target {
        PhaseTarget::Constant => theta.mean(),
        PhaseTarget::Field(f) => f.mean(),
    };
    let res_of = |theta: &ScalarField, c: f64| -> ScalarField {
        let values = match target {
            PhaseTarget::Constant => theta.values.par_iter().map(|v| v - c).collect(),
            PhaseTarget::Field(f) => theta
                .values
                .par_iter()
                .zip(f.values.par_iter())
                .map(|(v, t)| v - t)
                .collect(),
        };
        ScalarField {
            grid: theta.grid,
            values,
        }
    };
    let mut res = res_of(&theta, c);
    let mut sup = res.sup_abs();
    let mut history = vec![sup];
    let mut converged = sup <= opts.tol;
    let mut iterations = 0usize;

    while !converged && iterations < opts.max_iterations {
        let coeffs = linear_coefficients(&w);
        let forcing = 1e-4f64.min(0.1 * sup).max(1e-12);
        let neg_res = ScalarField {
            grid,
            values: res.values.par_iter().map(|v| -v).collect(),
        };
        let (du, dc, _kiters) = solve_direction(&coeffs, &neg_res, forcing, opts);
        let hess_du = complex_hessian(&du);

        // Backtracking: halve until the branch safeguard and the sup-norm
        // Armijo decrease both hold.
        let mut alpha = 1.0f64;
        let mut accepted = false;
        while alpha >= 1e-12 {
            let mut w_trial = w.clone();
            w_trial
                .data
                .par_iter_mut()
                .zip(hess_du.data.par_iter())
                .for_each(|(wv, hv)| *wv += alpha * hv);
            let eigs_trial = pointwise_eigs(&w_trial);
            let (theta_min, cone_min) = branch_margins(&eigs_trial);
            if theta_min > opts.branch_slack && cone_min > 0.0 {
                let theta_trial = theta_of_eigs(&eigs_trial);
                let c_trial = match target {
                    PhaseTarget::Constant => c + alpha * dc,
                    PhaseTarget::Field(_) => c,
                };
                let res_trial = res_of(&theta_trial, c_trial);
                let sup_trial = res_trial.sup_abs();
                if sup_trial <= (1.0 - opts.armijo * alpha) * sup {
                    u = u.axpy(alpha, &du)?;
                    u.remove_mean();
                    w = w_trial;
                    c = c_trial;
                    res = res_trial;
                    sup = sup_trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::SolverStall {
                t,
                iterations,
                res_sup: sup,
            });
        }
        iterations += 1;
        history.push(sup);
        converged = sup <= opts.tol;
    }

    if !converged {
        return Err(Error::NonConvergence {
            t,
            iterations,
            res_sup: sup,
        });
    }

    // Re-assemble from the accumulated u so the stored state satisfies the
    // recomputation invariant exactly.
    let w = assemble_w(chi, &u, t)?;
    let theta = theta_of_eigs(&pointwise_eigs(&w));
    let res = res_of(&theta, c);
    Ok(SolverState {
        u,
        c,
        t,
        w,
        residual: res,
        iterations,
        converged,
        history,
    })
}

/// Monitor record for a potential `u`.
pub fn monitors_of(u: &ScalarField) -> Monitors {
    let sup_u = u.sup_abs();
    let sup_grad = complex_gradient(u).sup_norm();
    let sup_hess = if sup_u == 0.0 {
        0.0
    } else {
        let eigs = pointwise_eigs(&complex_hessian(u));
        eigs.max_over_points(|lam| lam.iter().fold(0.0f64, |m, l| m.max(l.abs())))
    };
    Monitors {
        sup_u,
        sup_grad,
        sup_hess,
        hmw_ratio: sup_hess / (1.0 + sup_grad * sup_grad),
    }
}

/// Monitors of a solver state.
pub fn monitors(state: &SolverState) -> Monitors {
    monitors_of(&state.u)
}

/// Consistency check of the differentiated equation at a converged state:
/// `Σ F^{ij̄} ∂_p w_{ij̄} = 0` for every real direction `p`.
///
/// Contract for converged constant-target states on resolving grids:
/// normalized value ≤ 1e−6.
pub fn differentiate1_check(state: &SolverState) -> Result<Differentiate1Report> {
    if !state.converged {
        return Err(Error::domain(
            "differentiate1 check requires a converged state",
        ));
    }
    let grid = state.w.grid;
    let n = grid.n;
    let e = HermitianField::entries_per_point(n);
    let npoints = grid.npoints;
    let coeffs = linear_coefficients(&state.w);

    // complex entry fields of w, upper triangle including diagonal
    let entries: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let mut entry_fields: Vec<Vec<Complex64>> = Vec::with_capacity(entries.len());
    for &(i, j) in &entries {
        let mut buf = vec![Complex64::ZERO; npoints];
        if i == j {
            for p in 0..npoints {
                buf[p] = Complex64::new(state.w.data[p * e + i], 0.0);
            }
        } else {
            let s = field_pair_slot(n, i, j);
            for p in 0..npoints {
                buf[p] = Complex64::new(state.w.data[p * e + s], state.w.data[p * e + s + 1]);
            }
        }
        entry_fields.push(buf);
    }

    let mut sup_identity = 0.0f64;
    let mut sup_dw = 0.0f64;
    for axis in 0..grid.axes() {
        let derivs: Vec<Vec<Complex64>> = entry_fields
            .iter()
            .map(|f| field::first_derivative_complex(&grid, f, axis))
            .collect();
        for p in 0..npoints {
            let mut dw = CMat::zero(n);
            for (slot, &(i, j)) in entries.iter().enumerate() {
                let v = derivs[slot][p];
                if i == j {
                    dw.a[i][i] = Complex64::new(v.re, 0.0);
                } else {
                    dw.a[i][j] = v;
                    dw.a[j][i] = v.conj();
                }
                sup_dw = sup_dw.max(v.norm());
            }
            let f = coeffs.f.matrix_at(p);
            // tr(F · dW)
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += (f.a[i][j] * dw.a[j][i]).re;
                }
            }
            sup_identity = sup_identity.max(acc.abs());
        }
    }
    Ok(Differentiate1Report {
        sup_identity,
        sup_w_derivative: sup_dw,
    })
}

// mirror of the private pair_slot in field; kept in sync by the layout test
fn field_pair_slot(n: usize, i: usize, j: usize) -> usize {
    let before = i * n - i * (i + 1) / 2;
    n + 2 * (before + (j - i - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_chi, trig_field, TrigMode};
    use crate::sampling::SeedRng;

    fn diag_mat(entries: &[f64]) -> CMat {
        CMat::from_fn(entries.len(), |i, j| {
            if i == j {
                Complex64::new(entries[i], 0.0)
            } else {
                Complex64::ZERO
            }
        })
    }

    fn seeded_trig(grid: TorusGrid, rng: &mut SeedRng, modes: usize, amp: f64) -> ScalarField {
        let axes = grid.axes();
        let list: Vec<TrigMode> = (0..modes)
            .map(|_| {
                let mut wave = vec![0i64; axes];
                let axis = rng.index(axes);
                wave[axis] = 1;
                if rng.uniform() < 0.5 {
                    let other = rng.index(axes);
                    wave[other] = if other == axis { 0 } else { -1 };
                }
                TrigMode {
                    wave,
                    amplitude: amp * rng.range(0.4, 1.0),
                    phase: rng.range(0.0, 2.0 * PI),
                }
            })
            .collect();
        trig_field(grid, &list).unwrap()
    }

    #[test]
    fn residual_on_constant_field() {
        let grid = TorusGrid::new(3, 4).unwrap();
        let chi = HermitianField::constant(grid, &diag_mat(&[1.0, 1.0, 0.0])).unwrap();
        let u = ScalarField::zeros(grid);
        let t = 0.05;
        let c: f64 = [1.05f64, 1.05, 0.05].iter().map(|v| v.atan()).sum();
        let r = residual(&chi, &u, c, t).unwrap();
        assert!(r.sup_abs() < 1e-14);
        let r0 = residual(&chi, &u, 0.0, t).unwrap();
        assert!((r0.values[0] - c).abs() < 1e-14);
    }

    #[test]
    fn linear_coefficients_examples() {
        let grid = TorusGrid::new(3, 4).unwrap();
        // w = 0 → F = I
        let w0 = HermitianField::zeros(grid);
        let f0 = linear_coefficients(&w0);
        let m = f0.f.matrix_at(0);
        for i in 0..3 {
            assert!((m.a[i][i].re - 1.0).abs() < 1e-14);
        }
        // w = diag(1,1,0) → F = diag(1/2, 1/2, 1)
        let w1 = HermitianField::constant(grid, &diag_mat(&[1.0, 1.0, 0.0])).unwrap();
        let f1 = linear_coefficients(&w1);
        let m1 = f1.f.matrix_at(0);
        assert!((m1.a[0][0].re - 0.5).abs() < 1e-14);
        assert!((m1.a[2][2].re - 1.0).abs() < 1e-14);
        // random w: F (w² + I) = I
        let mut rng = SeedRng::new(17);
        let wr = HermitianField::constant(grid, &crate::sampling::hermitian(&mut rng, 3, 1.0))
            .unwrap();
        let fr = linear_coefficients(&wr);
        let wm = wr.matrix_at(0);
        let prod = fr
            .f
            .matrix_at(0)
            .mul(&wm.mul(&wm).add_scalar_diag(Complex64::new(1.0, 0.0)));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.a[i][j] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn f_eigenvalue_law() {
        // eig(F) = 1/(1+λ_i²) pointwise
        let grid = TorusGrid::new(2, 4).unwrap();
        let mut rng = SeedRng::new(8);
        let rho = seeded_trig(grid, &mut rng, 2, 0.3);
        let chi = build_chi(grid, &crate::sampling::hermitian(&mut rng, 2, 0.8), &rho).unwrap();
        let coeffs = linear_coefficients(&chi);
        let lam = pointwise_eigs(&chi);
        let flam = pointwise_eigs(&coeffs.f);
        for p in (0..grid.npoints).step_by(29) {
            let l = lam.point(p);
            let mut want: Vec<f64> = l.iter().map(|v| 1.0 / (1.0 + v * v)).collect();
            want.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (got, want) in flam.point(p).iter().zip(want.iter()) {
                assert!((got - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn apply_linearized_examples() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let ident = LinearizedCoefficients {
            f: HermitianField::constant(grid, &diag_mat(&[1.0, 1.0])).unwrap(),
        };
        // constant v → 0
        let c = ScalarField::from_values(grid, vec![2.0; grid.npoints]).unwrap();
        assert!(apply_linearized(&ident, &c).unwrap().sup_abs() < 1e-12);
        // F = I → complex Laplacian: for v = cos x₁, Δ_ℂ v = −¼ cos x₁
        let v = trig_field(
            grid,
            &[TrigMode {
                wave: vec![1, 0, 0, 0],
                amplitude: 1.0,
                phase: 0.0,
            }],
        )
        .unwrap();
        let lv = apply_linearized(&ident, &v).unwrap();
        for p in (0..grid.npoints).step_by(11) {
            assert!((lv.values[p] + 0.25 * v.values[p]).abs() < 1e-12);
        }
        // single mode with constant F: eigenfunction relation with the
        // quadratic-form symbol
        let mut rng = SeedRng::new(4);
        let fbar = {
            // positive definite: w² + I of a random Hermitian
            let h = crate::sampling::hermitian(&mut rng, 2, 0.7);
            h.mul(&h).add_scalar_diag(Complex64::new(1.0, 0.0)).inverse().hermitize()
        };
        let coeffs = LinearizedCoefficients {
            f: HermitianField::constant(grid, &fbar).unwrap(),
        };
        let mode = TrigMode {
            wave: vec![1, 0, -1, 0],
            amplitude: 0.8,
            phase: 0.4,
        };
        let vm = trig_field(grid, &[mode]).unwrap();
        let lvm = apply_linearized(&coeffs, &vm).unwrap();
        // symbol: ζ₁ = 1, ζ₂ = −1 → s = −¼ Σ F̄_ij conj(ζ_i) ζ_j
        let z = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let mut s = Complex64::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                s += fbar.a[i][j].conj() * z[i].conj() * z[j];
            }
        }
        let s = -0.25 * s.re;
        for p in (0..grid.npoints).step_by(13) {
            assert!(
                (lvm.values[p] - s * vm.values[p]).abs() < 1e-11,
                "eigenfunction relation at {p}"
            );
        }
    }

    #[test]
    fn constant_chi_converges_immediately() {
        let grid = TorusGrid::new(3, 4).unwrap();
        let chi = HermitianField::constant(grid, &diag_mat(&[2.0, 1.0, 0.4])).unwrap();
        let t = 0.1;
        let state = newton_solve(
            &chi,
            t,
            &ScalarField::zeros(grid),
            &PhaseTarget::Constant,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(state.converged);
        assert!(state.iterations <= 1);
        assert!(state.u.sup_abs() < 1e-13);
        let want: f64 = [2.1f64, 1.1, 0.5].iter().map(|v| v.atan()).sum();
        assert!((state.c - want).abs() < 1e-12);
        assert_eq!(monitors(&state).hmw_ratio, 0.0);
    }

    #[test]
    fn solves_perturbed_2d_problem_to_known_solution() {
        // χ = C + i∂∂̄ρ with constant C has the closed-form solution
        // u = mean(ρ) − ρ: the Hessians cancel and w is constant.
        let grid = TorusGrid::new(2, 8).unwrap();
        let mut rng = SeedRng::new(21);
        let rho = seeded_trig(grid, &mut rng, 3, 0.2);
        let chi = build_chi(grid, &diag_mat(&[2.0, 2.0]), &rho).unwrap();
        let state = newton_solve(
            &chi,
            0.05,
            &ScalarField::zeros(grid),
            &PhaseTarget::Constant,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(state.converged);
        let mut u_exact = ScalarField {
            grid,
            values: rho.values.iter().map(|v| -v).collect(),
        };
        u_exact.remove_mean();
        let err = state
            .u
            .values
            .iter()
            .zip(u_exact.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-8, "sup error {err}");
        // gauge
        assert!(state.u.mean().abs() < 1e-13);
        // residual recomputation invariant
        let rec = residual(&chi, &state.u, state.c, state.t).unwrap();
        let drift = rec
            .values
            .iter()
            .zip(state.residual.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(drift < 1e-13);
    }

    #[test]
    fn quadratic_tail_on_converged_solve() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let mut rng = SeedRng::new(33);
        let rho = seeded_trig(grid, &mut rng, 2, 0.35);
        let chi = build_chi(grid, &diag_mat(&[2.0, 1.5]), &rho).unwrap();
        let state = newton_solve(
            &chi,
            0.05,
            &ScalarField::zeros(grid),
            &PhaseTarget::Constant,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(state.converged);
        let h = &state.history;
        assert!(h.len() >= 3, "history too short: {h:?}");
        // at least quadratic over the last three entries, up to the
        // inexact-Newton forcing floor
        let k = h.len();
        let (a, b, c) = (h[k - 3], h[k - 2], h[k - 1]);
        assert!(
            c <= 10.0 * b * b / a.max(1e-300) + 1e-12,
            "tail not quadratic: {a:.3e} {b:.3e} {c:.3e}"
        );
    }

    #[test]
    fn manufactured_variable_target_recovers_u_star() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let mut rng = SeedRng::new(5);
        let mut u_star = seeded_trig(grid, &mut rng, 3, 0.1);
        u_star.remove_mean();
        let chi = build_chi(
            grid,
            &diag_mat(&[2.0, 2.0]),
            &seeded_trig(grid, &mut rng, 2, 0.15),
        )
        .unwrap();
        let t = 0.05;
        let w_star = assemble_w(&chi, &u_star, t).unwrap();
        let c_star = theta_of_eigs(&pointwise_eigs(&w_star));
        let state = newton_solve(
            &chi,
            t,
            &ScalarField::zeros(grid),
            &PhaseTarget::Field(c_star),
            &SolverOptions::default(),
        )
        .unwrap();
        let err = state
            .u
            .values
            .iter()
            .zip(u_star.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-8, "manufactured recovery error {err}");
    }

    #[test]
    fn linearization_matches_directional_finite_differences() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let mut rng = SeedRng::new(71);
        let chi = build_chi(
            grid,
            &diag_mat(&[2.0, 1.6]),
            &seeded_trig(grid, &mut rng, 2, 0.2),
        )
        .unwrap();
        let t = 0.08;
        for _ in 0..5 {
            let mut u = seeded_trig(grid, &mut rng, 2, 0.2);
            u.remove_mean();
            let v = seeded_trig(grid, &mut rng, 2, 0.5);
            let w = assemble_w(&chi, &u, t).unwrap();
            let coeffs = linear_coefficients(&w);
            let lv = apply_linearized(&coeffs, &v).unwrap();
            let h = 1e-5;
            let up = u.axpy(h, &v).unwrap();
            let um = u.axpy(-h, &v).unwrap();
            let rp = residual(&chi, &up, 0.0, t).unwrap();
            let rm = residual(&chi, &um, 0.0, t).unwrap();
            let mut err = 0.0f64;
            let mut scale = 0.0f64;
            for p in 0..grid.npoints {
                let fd = (rp.values[p] - rm.values[p]) / (2.0 * h);
                err = err.max((fd - lv.values[p]).abs());
                scale = scale.max(fd.abs());
            }
            assert!(err <= 1e-6 * scale.max(1.0), "rel err {}", err / scale);
        }
    }

    #[test]
    fn branch_safeguard_rejects_bad_initial_guess() {
        let grid = TorusGrid::new(3, 4).unwrap();
        // θ(0,0,0) = 0 < π/2: not supercritical
        let chi = HermitianField::zeros(grid);
        let err = newton_solve(
            &chi,
            0.01,
            &ScalarField::zeros(grid),
            &PhaseTarget::Constant,
            &SolverOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn monitors_closed_form_mode() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let a = 0.4;
        let u = trig_field(
            grid,
            &[TrigMode {
                wave: vec![1, 0, 0, 0],
                amplitude: a,
                phase: 0.0,
            }],
        )
        .unwrap();
        let m = monitors_of(&u);
        assert!((m.sup_u - a).abs() < 1e-12);
        assert!((m.sup_grad - a / 2.0).abs() < 1e-12);
        assert!((m.sup_hess - a / 4.0).abs() < 1e-10);
        let want = (a / 4.0) / (1.0 + (a / 2.0) * (a / 2.0));
        assert!((m.hmw_ratio - want).abs() < 1e-10);
    }

    #[test]
    fn differentiate1_behaviour() {
        // constant-coefficient solution: identically zero
        let grid = TorusGrid::new(2, 8).unwrap();
        let chi = HermitianField::constant(grid, &diag_mat(&[2.0, 1.0])).unwrap();
        let state = newton_solve(
            &chi,
            0.05,
            &ScalarField::zeros(grid),
            &PhaseTarget::Constant,
            &SolverOptions::default(),
        )
        .unwrap();
        let rep = differentiate1_check(&state).unwrap();
        assert!(rep.sup_identity < 1e-12);

        // converged constant-target solve on a perturbed field
        let mut rng = SeedRng::new(12);
        let chi2 = build_chi(
            grid,
            &diag_mat(&[2.0, 2.0]),
            &seeded_trig(grid, &mut rng, 2, 0.2),
        )
        .unwrap();
        let state2 = newton_solve(
            &chi2,
            0.05,
            &ScalarField::zeros(grid),
            &PhaseTarget::Constant,
            &SolverOptions::default(),
        )
        .unwrap();
        let rep2 = differentiate1_check(&state2).unwrap();
        assert!(rep2.normalized() <= 1e-6, "normalized {}", rep2.normalized());

        // negative control: a manufactured variable target breaks the
        // identity by |∂_p c*| at the solution
        let mut u_star = seeded_trig(grid, &mut rng, 2, 0.15);
        u_star.remove_mean();
        let w_star = assemble_w(&chi2, &u_star, 0.05).unwrap();
        let c_star = theta_of_eigs(&pointwise_eigs(&w_star));
        let state3 = newton_solve(
            &chi2,
            0.05,
            &ScalarField::zeros(grid),
            &PhaseTarget::Field(c_star.clone()),
            &SolverOptions::default(),
        )
        .unwrap();
        let rep3 = differentiate1_check(&state3).unwrap();
        // the identity residual must now match sup |∂_p c*| over directions
        let mut grad_sup = 0.0f64;
        let cspec: Vec<Complex64> = c_star.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for axis in 0..grid.axes() {
            let d = field::first_derivative_complex(&grid, &cspec, axis);
            grad_sup = d.iter().fold(grad_sup, |m, v| m.max(v.norm()));
        }
        assert!(grad_sup > 1e-3, "degenerate negative control");
        assert!(
            (rep3.sup_identity - grad_sup).abs() <= 1e-5 * grad_sup.max(1.0),
            "identity sup {} vs target-gradient sup {}",
            rep3.sup_identity,
            grad_sup
        );

        // non-converged states are rejected
        let mut bad = state2.clone();
        bad.converged = false;
        assert!(differentiate1_check(&bad).is_err());
    }

    #[test]
    fn gauge_and_ellipticity_invariants() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let mut rng = SeedRng::new(92);
        let chi = build_chi(
            grid,
            &diag_mat(&[2.0, 1.8]),
            &seeded_trig(grid, &mut rng, 3, 0.25),
        )
        .unwrap();
        let state = newton_solve(
            &chi,
            0.05,
            &ScalarField::zeros(grid),
            &PhaseTarget::Constant,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(state.u.mean().abs() < 1e-13);
        // smallest eigenvalue of F positive at every accepted point
        let coeffs = linear_coefficients(&state.w);
        let fl = pointwise_eigs(&coeffs.f);
        assert!(fl.min_over_points(|lam| lam[lam.len() - 1]) > 0.0);
        // branch invariant on the final state
        let eigs = pointwise_eigs(&state.w);
        let (tmin, cmin) = branch_margins(&eigs);
        assert!(tmin > 0.0 && cmin > 0.0);
    }
}
