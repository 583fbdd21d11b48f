//! March `t` downward along a geometric schedule, warm-starting each solve,
//! and extract the critical-equation residuals at the smallest `t`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;

use crate::cone::critical_form_parts_slice;
use crate::error::Error;
use crate::field::{complex_hessian, pointwise_eigs, HermitianField, ScalarField};
use crate::phase::{self, circle_distance};
use crate::solver::{self, PhaseTarget, SolverOptions, SolverState};
use crate::Result;

/// Geometric schedule `t_k = t0 · ratio^k`, truncated at `t_min` (which is
/// appended as the final parameter).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t0: f64,
    pub ratio: f64,
    pub t_min: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            t0: 0.2,
            ratio: 0.5,
            t_min: 1e-3,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t0 > 0.0) {
            return Err(Error::domain("schedule parameters must be positive"));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::domain("schedule ratio must lie in (0, 1)"));
        }
        Ok(())
    }

    /// The descending parameter list. Degenerate schedules (`t_min ≥ t0`)
    /// collapse to the single value `t0`.
    pub fn parameters(&self) -> Vec<f64> {
        if self.t_min >= self.t0 {
            return vec![self.t0];
        }
        let mut ts = Vec::new();
        let mut t = self.t0;
        while t > self.t_min {
            ts.push(t);
            t *= self.ratio;
        }
        ts.push(self.t_min);
        ts
    }
}

/// One row of the continuity trace.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub t: f64,
    pub hat_theta: f64,
    pub target_theta: f64,
    pub c_solved: f64,
    pub newton_iters: usize,
    pub res_sup: f64,
    pub sup_u: f64,
    pub sup_grad: f64,
    pub sup_hess: f64,
    pub hmw_ratio: f64,
    pub wall_time_s: f64,
    /// False only on a flagged (stalled / non-converged) final row.
    pub converged: bool,
}

/// Ordered record of the per-`t` solves, plus the final state.
#[derive(Clone, Debug)]
pub struct ContinuityTrace {
    pub rows: Vec<TraceRow>,
    /// State of the last converged solve, if any.
    pub final_state: Option<SolverState>,
    /// Every converged state along the path when `keep_states` was set.
    pub states: Vec<SolverState>,
}

/// Driver options on top of the per-solve options.
#[derive(Clone, Copy, Debug, Default)]
pub struct PathOptions {
    pub solver: SolverOptions,
    /// Retain every converged state (per-row consistency checks).
    pub keep_states: bool,
}

fn solve_row(
    chi: &HermitianField,
    t: f64,
    warm: &ScalarField,
    opts: &SolverOptions,
) -> Result<(TraceRow, SolverState)> {
    let clock = Instant::now();
    let sample = phase::hat_theta(chi, t)?;
    let state = solver::newton_solve(chi, t, warm, &PhaseTarget::Constant, opts)?;
    let mon = solver::monitors(&state);
    let row = TraceRow {
        t,
        hat_theta: sample.hat_theta,
        target_theta: sample.target_theta,
        c_solved: state.c,
        newton_iters: state.iterations,
        res_sup: state.residual.sup_abs(),
        sup_u: mon.sup_u,
        sup_grad: mon.sup_grad,
        sup_hess: mon.sup_hess,
        hmw_ratio: mon.hmw_ratio,
        wall_time_s: clock.elapsed().as_secs_f64(),
        converged: true,
    };
    Ok((row, state))
}

fn flagged_row(t: f64, err: &Error) -> TraceRow {
    let (iters, res) = match err {
        Error::SolverStall {
            iterations,
            res_sup,
            ..
        }
        | Error::NonConvergence {
            iterations,
            res_sup,
            ..
        } => (*iterations, *res_sup),
        _ => (0, f64::NAN),
    };
    TraceRow {
        t,
        hat_theta: f64::NAN,
        target_theta: f64::NAN,
        c_solved: f64::NAN,
        newton_iters: iters,
        res_sup: res,
        sup_u: f64::NAN,
        sup_grad: f64::NAN,
        sup_hess: f64::NAN,
        hmw_ratio: f64::NAN,
        wall_time_s: 0.0,
        converged: false,
    }
}

/// Runs the continuity path.
///
/// Preconditions: `ū = 0` passes the subsolution check at `t0` for the
/// target phase `θ(t0)`, and `θ̂(0) = π` to `1e−6`. Each parameter is solved
/// with a warm start from its predecessor; on a solver stall the geometric
/// midpoint is inserted once before the path aborts with a flagged row.
pub fn run_path(
    chi: &HermitianField,
    schedule: &Schedule,
    opts: &PathOptions,
) -> Result<ContinuityTrace> {
    schedule.validate()?;
    let at_zero = phase::hat_theta(chi, 0.0)?;
    if circle_distance(at_zero.hat_theta, PI) > 1e-6 {
        return Err(Error::precondition(format!(
            "path requires hat_theta(0) = pi to 1e-6; got {:.9}",
            at_zero.hat_theta
        )));
    }
    let ts = schedule.parameters();
    let t0 = ts[0];
    let target0 = phase::hat_theta(chi, t0)?.target_theta;
    let zero = ScalarField::zeros(chi.grid);
    let (sub_ok, margin) = phase::subsolution_verify(chi, &zero, t0, target0)?;
    if !sub_ok {
        return Err(Error::precondition(format!(
            "subsolution check fails at t0 = {t0}: worst margin {margin:.3e}"
        )));
    }

    let mut rows = Vec::with_capacity(ts.len());
    let mut states = Vec::new();
    let mut final_state: Option<SolverState> = None;
    let mut warm = ScalarField::zeros(chi.grid);
    let mut prev_t = None::<f64>;
    let accept = |row: TraceRow,
                      state: SolverState,
                      rows: &mut Vec<TraceRow>,
                      states: &mut Vec<SolverState>,
                      warm: &mut ScalarField,
                      final_state: &mut Option<SolverState>| {
        rows.push(row);
        *warm = state.u.clone();
        if opts.keep_states {
            states.push(state.clone());
        }
        *final_state = Some(state);
    };
    for (k, &t) in ts.iter().enumerate() {
        match solve_row(chi, t, &warm, &opts.solver) {
            Ok((row, state)) => {
                accept(row, state, &mut rows, &mut states, &mut warm, &mut final_state);
                prev_t = Some(t);
            }
            Err(err @ (Error::SolverStall { .. } | Error::NonConvergence { .. })) => {
                // one geometric-midpoint retry before aborting the path
                let retried = prev_t
                    .map(|tp| (tp * t).sqrt())
                    .and_then(|tmid| solve_row(chi, tmid, &warm, &opts.solver).ok());
                if let Some((mid_row, mid_state)) = retried {
                    accept(
                        mid_row,
                        mid_state,
                        &mut rows,
                        &mut states,
                        &mut warm,
                        &mut final_state,
                    );
                    match solve_row(chi, t, &warm, &opts.solver) {
                        Ok((row, state)) => {
                            accept(row, state, &mut rows, &mut states, &mut warm, &mut final_state);
                            prev_t = Some(t);
                        }
                        Err(err2) => {
                            rows.push(flagged_row(t, &err2));
                            break;
                        }
                    }
                } else {
                    if k == 0 {
                        return Err(err);
                    }
                    rows.push(flagged_row(t, &err));
                    break;
                }
            }
            Err(other) => return Err(other),
        }
    }
    Ok(ContinuityTrace {
        rows,
        final_state,
        states,
    })
}

/// Residuals of the critical equation at a final state, evaluated on
/// `χ_u = χ + i∂∂̄u` (no `tω` shift): the phase residual
/// `sup |θ(λ) − (n−2)π/2|` and the σ-form residual
/// `sup |Im Π_j (λ_j + i)|`.
pub fn critical_residual(chi: &HermitianField, state: &SolverState) -> Result<(f64, f64)> {
    if !state.converged {
        return Err(Error::domain("critical residual requires a converged state"));
    }
    let chi_u = if state.u.sup_abs() == 0.0 {
        chi.clone()
    } else {
        chi.add(&complex_hessian(&state.u))?
    };
    let eigs = pointwise_eigs(&chi_u);
    let critical = (chi.grid.n as f64 - 2.0) * PI / 2.0;
    let theta_res = eigs
        .max_over_points(|lam| (lam.iter().map(|l| l.atan()).sum::<f64>() - critical).abs());
    let sigma_res = eigs.max_over_points(|lam| critical_form_parts_slice(lam).1.abs());
    Ok((theta_res, sigma_res))
}

/// Boundedness check on the Hessian-to-gradient ratio along the trace:
/// pass iff `max_rows hmw_ratio ≤ bound`, with the default bound
/// `max(10 × first-row ratio, 1.0)`.
pub fn hmw_trace_check(trace: &ContinuityTrace, bound: Option<f64>) -> Result<(f64, bool)> {
    let converged: Vec<&TraceRow> = trace.rows.iter().filter(|r| r.converged).collect();
    if converged.is_empty() {
        return Err(Error::domain("hmw check needs a non-empty trace"));
    }
    let max_ratio = converged
        .iter()
        .map(|r| r.hmw_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = bound.unwrap_or_else(|| (10.0 * converged[0].hmw_ratio).max(1.0));
    Ok((max_ratio, max_ratio <= bound))
}

/// Worst margin of the `ū = 0` subsolution condition over the whole
/// schedule (diagnostic used by the suites).
pub fn path_subsolution_margin(chi: &HermitianField, schedule: &Schedule) -> Result<f64> {
    let zero = ScalarField::zeros(chi.grid);
    let mut worst = f64::INFINITY;
    for t in schedule.parameters() {
        let target = phase::hat_theta(chi, t)?.target_theta;
        let (_, margin) = phase::subsolution_verify(chi, &zero, t, target)?;
        worst = worst.min(margin);
    }
    Ok(worst)
}
