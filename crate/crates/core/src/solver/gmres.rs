//! Restarted GMRES with right preconditioning.
//!
//! Matrix-free: the operator and preconditioner are closures on flat
//! vectors. All inner products go through the deterministic pairwise
//! reduction, so iterates are bit-reproducible across thread counts.

use crate::reduce::{pairwise_dot, pairwise_sum_by};

pub struct GmresOutcome {
    pub solution: Vec<f64>,
    /// Final true-residual norm relative to `‖b‖`.
    pub rel_residual: f64,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    pairwise_dot(v, v).sqrt()
}

/// Solves `A x = b` with `A` applied by `apply` and the (right)
/// preconditioner `M⁻¹` applied by `precond`; Arnoldi runs on `A M⁻¹`.
pub fn gmres<A, M>(
    apply: A,
    precond: M,
    b: &[f64],
    rel_tol: f64,
    restart: usize,
    max_iters: usize,
) -> GmresOutcome
where
    A: Fn(&[f64]) -> Vec<f64>,
    M: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return GmresOutcome {
            solution: x,
            rel_residual: 0.0,
            iterations: 0,
        };
    }
    let abs_tol = rel_tol * bnorm;
    let mut r = b.to_vec();
    let mut rnorm = bnorm;
    let mut total_iters = 0usize;

    while rnorm > abs_tol && total_iters < max_iters {
        let m = restart.min(max_iters - total_iters);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / rnorm).collect());
        let mut h = vec![vec![0.0f64; m]; m + 2];
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![0.0f64; m];
        let mut g = vec![0.0f64; m + 1];
        g[0] = rnorm;
        let mut cols = 0usize;

        for j in 0..m {
            let z = precond(&basis[j]);
            let mut w = apply(&z);
            for i in 0..=j {
                let hij = pairwise_dot(&w, &basis[i]);
                h[i][j] = hij;
                let vi = &basis[i];
                for (wk, vk) in w.iter_mut().zip(vi.iter()) {
                    *wk -= hij * vk;
                }
            }
            let hlast = norm(&w);
            // previous Givens rotations
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            // new rotation eliminating the subdiagonal
            let denom = (h[j][j] * h[j][j] + hlast * hlast).sqrt();
            if denom == 0.0 {
                cols = j;
                break;
            }
            cs[j] = h[j][j] / denom;
            sn[j] = hlast / denom;
            h[j][j] = denom;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            total_iters += 1;
            cols = j + 1;

            let est = g[j + 1].abs();
            if hlast == 0.0 || est <= abs_tol || total_iters >= max_iters {
                break;
            }
            basis.push(w.iter().map(|v| v / hlast).collect());
        }

        if cols == 0 {
            break;
        }
        // back substitution for y
        let mut y = vec![0.0f64; cols];
        for i in (0..cols).rev() {
            let mut acc = g[i];
            for k in i + 1..cols {
                acc -= h[i][k] * y[k];
            }
            y[i] = acc / h[i][i];
        }
        // x += M⁻¹ (V y)
        let vy: Vec<f64> = (0..n)
            .map(|row| pairwise_sum_by(cols, &|i| basis[i][row] * y[i]))
            .collect();
        let update = precond(&vy);
        for (xi, ui) in x.iter_mut().zip(update.iter()) {
            *xi += ui;
        }
        // true residual for the restart / exit decision
        let ax = apply(&x);
        r = b.iter().zip(ax.iter()).map(|(bi, ai)| bi - ai).collect();
        rnorm = norm(&r);
    }

    GmresOutcome {
        solution: x,
        rel_residual: rnorm / bnorm,
        iterations: total_iters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // 4x4 diagonally dominant system, identity preconditioner
        let a = [
            [4.0, 1.0, 0.0, 0.5],
            [1.0, 5.0, 1.0, 0.0],
            [0.0, 1.0, 6.0, 1.0],
            [0.5, 0.0, 1.0, 7.0],
        ];
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..4)
                .map(|i| (0..4).map(|j| a[i][j] * v[j]).sum())
                .collect()
        };
        let b = vec![1.0, -2.0, 3.0, 0.25];
        let out = gmres(apply, |v: &[f64]| v.to_vec(), &b, 1e-12, 4, 50);
        let ax = apply(&out.solution);
        for (l, r) in ax.iter().zip(b.iter()) {
            assert!((l - r).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_preconditioner_converges_in_one_iteration() {
        let a = [[3.0, 0.0], [0.0, 9.0]];
        let apply = move |v: &[f64]| vec![a[0][0] * v[0], a[1][1] * v[1]];
        let precond = move |v: &[f64]| vec![v[0] / a[0][0], v[1] / a[1][1]];
        let out = gmres(apply, precond, &[1.0, 2.0], 1e-12, 10, 50);
        assert_eq!(out.iterations, 1);
        assert!((out.solution[0] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let out = gmres(|v: &[f64]| v.to_vec(), |v: &[f64]| v.to_vec(), &[0.0; 5], 1e-10, 5, 10);
        assert_eq!(out.solution, vec![0.0; 5]);
        assert_eq!(out.iterations, 0);
    }
}
