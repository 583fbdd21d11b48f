//! Seeded sampling utilities.
//!
//! All randomness in the crate flows through [`SeedRng`] (ChaCha8, a
//! counter-based stream cipher), so any artifact is a pure function of its
//! config seed. Parallel samplers derive one seed per work item with
//! [`derive_seed`], which keeps results independent of scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::herm::CMat;

/// Deterministic seeded generator.
pub struct SeedRng(ChaCha8Rng);

impl SeedRng {
    pub fn new(seed: u64) -> Self {
        SeedRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    /// Standard normal by Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(f64::MIN_POSITIVE);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }
}

/// SplitMix64 step: decorrelated per-item seed from (seed, index).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Haar-ish random unitary: complex Ginibre matrix orthonormalized by
/// modified Gram-Schmidt. Good enough for seeded conjugations.
pub fn unitary(rng: &mut SeedRng, n: usize) -> CMat {
    loop {
        let mut g = CMat::from_fn(n, |_, _| rng.complex_normal());
        let mut ok = true;
        for col in 0..n {
            for prev in 0..col {
                let mut proj = Complex64::ZERO;
                for r in 0..n {
                    proj += g.a[r][prev].conj() * g.a[r][col];
                }
                for r in 0..n {
                    let s = proj * g.a[r][prev];
                    g.a[r][col] -= s;
                }
            }
            let norm: f64 = (0..n).map(|r| g.a[r][col].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for r in 0..n {
                g.a[r][col] /= norm;
            }
        }
        if ok {
            return g;
        }
    }
}

/// Random Hermitian matrix with independent Gaussian entries of the given
/// scale.
pub fn hermitian(rng: &mut SeedRng, n: usize, scale: f64) -> CMat {
    let g = CMat::from_fn(n, |_, _| rng.complex_normal().scale(scale));
    g.add(&g.adjoint()).scale(0.5)
}
