//! Independent oracle for the n = 2 constant-target solve: second-order
//! centered finite differences on the same grid, dense Newton with an LU
//! factorization, free phase constant, mean-zero gauge.
//!
//! Nothing here touches the spectral differentiation or Krylov machinery
//! under test; the χ field enters as plain sampled data.

use lyz_core::field::HermitianField;

const AXES: usize = 4; // n = 2 complex dimensions

pub struct FdProblem {
    pub n_axis: usize,
    pub npoints: usize,
    /// χ per point: [χ₀₀, χ₁₁, Re χ₀₁, Im χ₀₁].
    pub chi: Vec<[f64; 4]>,
    pub t: f64,
    h2: f64,
}

/// Stencil offsets a residual at one point can reach: center, axial ±1, and
/// the ±1/±1 diagonals of every axis pair.
fn stencil_offsets() -> Vec<[i64; AXES]> {
    let mut out = vec![[0i64; AXES]];
    for a in 0..AXES {
        for s in [-1i64, 1] {
            let mut o = [0i64; AXES];
            o[a] = s;
            out.push(o);
        }
    }
    for a in 0..AXES {
        for b in a + 1..AXES {
            for sa in [-1i64, 1] {
                for sb in [-1i64, 1] {
                    let mut o = [0i64; AXES];
                    o[a] = sa;
                    o[b] = sb;
                    out.push(o);
                }
            }
        }
    }
    out
}

impl FdProblem {
    pub fn new(chi: &HermitianField, t: f64) -> Self {
        assert_eq!(chi.grid.n, 2, "oracle is specific to n = 2");
        let n_axis = chi.grid.points_per_axis;
        let npoints = chi.grid.npoints;
        let data: Vec<[f64; 4]> = (0..npoints)
            .map(|p| {
                let s = chi.point(p);
                [s[0], s[1], s[2], s[3]]
            })
            .collect();
        let h = chi.grid.spacing();
        FdProblem {
            n_axis,
            npoints,
            chi: data,
            t,
            h2: h * h,
        }
    }

    fn coords(&self, p: usize) -> [usize; AXES] {
        let n = self.n_axis;
        [
            p / (n * n * n) % n,
            p / (n * n) % n,
            p / n % n,
            p % n,
        ]
    }

    fn index(&self, c: [usize; AXES]) -> usize {
        let n = self.n_axis;
        ((c[0] * n + c[1]) * n + c[2]) * n + c[3]
    }

    fn shift(&self, p: usize, offset: [i64; AXES]) -> usize {
        let n = self.n_axis as i64;
        let c = self.coords(p);
        let mut out = [0usize; AXES];
        for a in 0..AXES {
            out[a] = ((c[a] as i64 + offset[a]).rem_euclid(n)) as usize;
        }
        self.index(out)
    }

    fn second_same(&self, u: &[f64], p: usize, axis: usize) -> f64 {
        let mut plus = [0i64; AXES];
        plus[axis] = 1;
        let mut minus = [0i64; AXES];
        minus[axis] = -1;
        (u[self.shift(p, plus)] - 2.0 * u[p] + u[self.shift(p, minus)]) / self.h2
    }

    fn second_mixed(&self, u: &[f64], p: usize, a: usize, b: usize) -> f64 {
        let mut pp = [0i64; AXES];
        pp[a] = 1;
        pp[b] = 1;
        let mut pm = [0i64; AXES];
        pm[a] = 1;
        pm[b] = -1;
        let mut mp = [0i64; AXES];
        mp[a] = -1;
        mp[b] = 1;
        let mut mm = [0i64; AXES];
        mm[a] = -1;
        mm[b] = -1;
        (u[self.shift(p, pp)] - u[self.shift(p, pm)] - u[self.shift(p, mp)]
            + u[self.shift(p, mm)])
            / (4.0 * self.h2)
    }

    /// θ(λ(χ + tI + FD-Hess u)) − c at every point.
    pub fn residual(&self, u: &[f64], c: f64) -> Vec<f64> {
        // real axes: x₁ = 0, y₁ = 1, x₂ = 2, y₂ = 3
        (0..self.npoints)
            .map(|p| {
                let uxx = self.second_same(u, p, 0);
                let uyy = self.second_same(u, p, 1);
                let uxx2 = self.second_same(u, p, 2);
                let uyy2 = self.second_same(u, p, 3);
                // entry (0,0): ¼(u_{x1x1} + u_{y1y1})
                let h00 = 0.25 * (uxx + uyy);
                let h11 = 0.25 * (uxx2 + uyy2);
                // entry (0,1): ¼(u_{x1x2} + u_{y1y2}) + (i/4)(u_{x1y2} − u_{y1x2})
                let re01 = 0.25 * (self.second_mixed(u, p, 0, 2) + self.second_mixed(u, p, 1, 3));
                let im01 = 0.25 * (self.second_mixed(u, p, 0, 3) - self.second_mixed(u, p, 1, 2));
                let w00 = self.chi[p][0] + self.t + h00;
                let w11 = self.chi[p][1] + self.t + h11;
                let wre = self.chi[p][2] + re01;
                let wim = self.chi[p][3] + im01;
                let mid = 0.5 * (w00 + w11);
                let rad = (0.25 * (w00 - w11) * (w00 - w11) + wre * wre + wim * wim).sqrt();
                (mid + rad).atan() + (mid - rad).atan() - c
            })
            .collect()
    }

    fn sup(v: &[f64]) -> f64 {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Dense Jacobian of [residual; mean(u)] in the unknowns [u; c], built by
    /// central differences over stencil-disjoint color classes (indices
    /// congruent mod 4 on every axis never share a stencil).
    fn jacobian(&self, u: &[f64], c: f64) -> Vec<Vec<f64>> {
        let n = self.npoints;
        let dim = n + 1;
        let mut jac = vec![vec![0.0f64; dim]; dim];
        let offsets = stencil_offsets();
        let h = 1e-6;
        let mut up = u.to_vec();
        let mut um = u.to_vec();
        for class in 0..256usize {
            let cls = [
                class / 64 % 4,
                class / 16 % 4,
                class / 4 % 4,
                class % 4,
            ];
            let members: Vec<usize> = (0..n)
                .filter(|&p| {
                    let co = self.coords(p);
                    (0..AXES).all(|a| co[a] % 4 == cls[a])
                })
                .collect();
            for &m in &members {
                up[m] += h;
                um[m] -= h;
            }
            let rp = self.residual(&up, c);
            let rm = self.residual(&um, c);
            for &m in &members {
                up[m] = u[m];
                um[m] = u[m];
            }
            for z in 0..n {
                for o in &offsets {
                    let s = self.shift(z, *o);
                    let co = self.coords(s);
                    if (0..AXES).all(|a| co[a] % 4 == cls[a]) {
                        jac[z][s] = (rp[z] - rm[z]) / (2.0 * h);
                    }
                }
            }
        }
        for z in 0..n {
            jac[z][n] = -1.0; // ∂res/∂c
        }
        for s in 0..n {
            jac[n][s] = 1.0 / n as f64; // mean constraint row
        }
        jac
    }

    /// Solves the bordered FD system by damped dense Newton from u = 0.
    /// Returns (u, c, final sup-residual).
    pub fn solve(&self, tol: f64, max_iters: usize) -> (Vec<f64>, f64, f64) {
        let n = self.npoints;
        let mut u = vec![0.0f64; n];
        let res0 = self.residual(&u, 0.0);
        let mut c = res0.iter().sum::<f64>() / n as f64;
        let mut res = self.residual(&u, c);
        let mut sup = Self::sup(&res);
        for _ in 0..max_iters {
            if sup <= tol {
                break;
            }
            let jac = self.jacobian(&u, c);
            let mut rhs: Vec<f64> = res.iter().map(|r| -r).collect();
            let mean_u = u.iter().sum::<f64>() / n as f64;
            rhs.push(-mean_u);
            let delta = lu_solve(jac, rhs);
            // damped update
            let mut alpha = 1.0;
            loop {
                let u_try: Vec<f64> =
                    u.iter().zip(delta[..n].iter()).map(|(a, d)| a + alpha * d).collect();
                let c_try = c + alpha * delta[n];
                let res_try = self.residual(&u_try, c_try);
                let sup_try = Self::sup(&res_try);
                if sup_try < sup || alpha < 1e-4 {
                    u = u_try;
                    c = c_try;
                    res = res_try;
                    sup = sup_try;
                    break;
                }
                alpha *= 0.5;
            }
        }
        (u, c, sup)
    }
}

/// Dense LU with partial pivoting, consuming the matrix.
fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col][col].abs();
        for r in col + 1..n {
            if a[r][col].abs() > best {
                best = a[r][col].abs();
                piv = r;
            }
        }
        assert!(best > 0.0, "singular FD Jacobian");
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
        }
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        let binv = 1.0 / prow[col];
        let bcol = b[col];
        for (ri, row) in rest.iter_mut().enumerate() {
            let factor = row[col] * binv;
            if factor != 0.0 {
                for k in col..n {
                    row[k] -= factor * prow[k];
                }
                b[col + 1 + ri] -= factor * bcol;
            }
        }
    }
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for k in i + 1..n {
            acc -= a[i][k] * x[k];
        }
        x[i] = acc / a[i][i];
    }
    x
}
