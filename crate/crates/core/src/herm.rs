//! Dense kernels for small Hermitian matrices (n ≤ 5).
//!
//! Everything here runs once per grid point inside hot loops, so the types
//! are fixed-size stack arrays with a runtime dimension. Eigenvalues use the
//! closed form for n ≤ 2 and cyclic Jacobi sweeps otherwise; no external
//! linear-algebra dependency, fully deterministic.

use num_complex::Complex64;

/// Maximum supported dimension (grid fields use n ≤ 4; the dimension lift
/// in the weak-solution lab needs n + 1 ≤ 5).
pub const MAX_N: usize = 5;

/// Off-diagonal Frobenius threshold at which Jacobi sweeps stop, relative
/// to the matrix scale.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 40;

/// Dense complex matrix with runtime dimension `n ≤ MAX_N`.
#[derive(Clone, Copy, Debug)]
pub struct CMat {
    pub n: usize,
    pub a: [[Complex64; MAX_N]; MAX_N],
}

impl CMat {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_N);
        CMat {
            n,
            a: [[Complex64::ZERO; MAX_N]; MAX_N],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zero(n);
        for i in 0..n {
            m.a[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i][j] = f(i, j);
            }
        }
        m
    }

    /// `self + s * I`.
    pub fn add_scalar_diag(&self, s: Complex64) -> CMat {
        let mut m = *self;
        for i in 0..self.n {
            m.a[i][i] += s;
        }
        m
    }

    pub fn add(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.n, other.n);
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] += other.a[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> CMat {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] *= s;
            }
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut m = CMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i][k];
                for j in 0..n {
                    m.a[i][j] += aik * other.a[k][j];
                }
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| self.a[j][i].conj())
    }

    /// `U * self * U^H` for a (presumed unitary) `U`.
    pub fn conjugate_by(&self, u: &CMat) -> CMat {
        u.mul(self).mul(&u.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    /// Largest entry magnitude; scale reference for thresholds.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].norm());
            }
        }
        m
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.a;
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col][col].norm_sqr();
            for r in col + 1..n {
                let v = a[r][col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Complex64::ZERO;
            }
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            let inv = Complex64::new(1.0, 0.0) / a[col][col];
            for r in col + 1..n {
                let factor = a[r][col] * inv;
                for c in col..n {
                    let sub = factor * a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan with partial pivoting. Panics on exactly
    /// singular input; callers only invert `w² + I`, which is positive
    /// definite.
    pub fn inverse(&self) -> CMat {
        let n = self.n;
        let mut a = self.a;
        let mut inv = CMat::identity(n).a;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col][col].norm_sqr();
            for r in col + 1..n {
                let v = a[r][col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            assert!(best > 0.0, "singular matrix in CMat::inverse");
            if piv != col {
                a.swap(piv, col);
                inv.swap(piv, col);
            }
            let d = Complex64::new(1.0, 0.0) / a[col][col];
            for c in 0..n {
                a[col][c] *= d;
                inv[col][c] *= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r][col];
                if factor == Complex64::ZERO {
                    continue;
                }
                for c in 0..n {
                    let s1 = factor * a[col][c];
                    let s2 = factor * inv[col][c];
                    a[r][c] -= s1;
                    inv[r][c] -= s2;
                }
            }
        }
        CMat { n, a: inv }
    }

    /// Enforce exact Hermitian symmetry by averaging with the adjoint.
    pub fn hermitize(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| {
            (self.a[i][j] + self.a[j][i].conj()) * 0.5
        })
    }
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// n = 1, 2 use closed forms; n ≥ 3 uses cyclic Jacobi with complex
/// rotations until the off-diagonal mass falls below `1e-13` of the scale.
pub fn eigenvalues(m: &CMat) -> [f64; MAX_N] {
    let n = m.n;
    let mut out = [0.0f64; MAX_N];
    match n {
        1 => out[0] = m.a[0][0].re,
        2 => {
            let a = m.a[0][0].re;
            let b = m.a[1][1].re;
            let c2 = m.a[0][1].norm_sqr();
            let mid = 0.5 * (a + b);
            let rad = (0.25 * (a - b) * (a - b) + c2).sqrt();
            out[0] = mid + rad;
            out[1] = mid - rad;
        }
        _ => {
            let mut a = m.a;
            let scale = m.max_abs().max(f64::MIN_POSITIVE);
            for _sweep in 0..JACOBI_MAX_SWEEPS {
                let mut off = 0.0f64;
                for p in 0..n {
                    for q in p + 1..n {
                        off += a[p][q].norm_sqr();
                    }
                }
                if off.sqrt() <= JACOBI_TOL * scale {
                    break;
                }
                for p in 0..n {
                    for q in p + 1..n {
                        jacobi_rotate(&mut a, n, p, q);
                    }
                }
            }
            for i in 0..n {
                out[i] = a[i][i].re;
            }
        }
    }
    // Insertion sort, descending; n ≤ 5.
    for i in 1..n {
        let v = out[i];
        let mut j = i;
        while j > 0 && out[j - 1] < v {
            out[j] = out[j - 1];
            j -= 1;
        }
        out[j] = v;
    }
    out
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
fn jacobi_rotate(a: &mut [[Complex64; MAX_N]; MAX_N], n: usize, p: usize, q: usize) {
    let apq = a[p][q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let u = apq / mag; // phase factor e^{iφ}
    let app = a[p][p].re;
    let aqq = a[q][q].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Columns: e_p' = c e_p - s ū e_q,  e_q' = s u e_p + c e_q.
    let (cp, sq) = (Complex64::new(c, 0.0), u * s);
    for k in 0..n {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = akp * cp - akq * sq.conj();
        a[k][q] = akp * sq + akq * cp;
    }
    for k in 0..n {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = apk * cp - aqk * sq;
        a[q][k] = apk * sq.conj() + aqk * cp;
    }
    // Clean rounding on entries forced by the rotation.
    a[p][q] = Complex64::ZERO;
    a[q][p] = Complex64::ZERO;
    a[p][p] = Complex64::new(a[p][p].re, 0.0);
    a[q][q] = Complex64::new(a[q][q].re, 0.0);
}
