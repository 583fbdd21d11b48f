//! Deterministic reductions.
//!
//! Every grid-wide sum in the crate goes through [`pairwise_sum`]: a fixed
//! binary tree whose shape depends only on the slice length, never on the
//! number of worker threads. Results are therefore bit-identical across
//! `--threads` settings. Max-reductions are associative and commutative on
//! finite floats, so they use plain folds.

use num_complex::Complex64;
use rayon::join;

/// Below this length the tree bottoms out in a sequential loop.
const LEAF: usize = 128;
/// Above this length the two halves run on separate workers.
const PAR_THRESHOLD: usize = 16_384;

/// Sum with a fixed pairwise tree (split at the midpoint).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    if values.len() >= PAR_THRESHOLD {
        let (a, b) = join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Pairwise sum of `f(i)` over `0..len` without materializing the vector.
pub fn pairwise_sum_by<F>(len: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    sum_by_range(0, len, f)
}

fn sum_by_range<F>(start: usize, len: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if len <= LEAF {
        let mut acc = 0.0;
        for i in start..start + len {
            acc += f(i);
        }
        return acc;
    }
    let half = len / 2;
    if len >= PAR_THRESHOLD {
        let (a, b) = join(
            || sum_by_range(start, half, f),
            || sum_by_range(start + half, len - half, f),
        );
        a + b
    } else {
        sum_by_range(start, half, f) + sum_by_range(start + half, len - half, f)
    }
}

/// Pairwise sum of complex values (same tree as [`pairwise_sum`]).
pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    if values.len() >= PAR_THRESHOLD {
        let (a, b) = join(|| pairwise_sum_complex(lo), || pairwise_sum_complex(hi));
        a + b
    } else {
        pairwise_sum_complex(lo) + pairwise_sum_complex(hi)
    }
}

/// Deterministic dot product built on the pairwise tree.
pub fn pairwise_dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    pairwise_sum_by(a.len(), &|i| a[i] * b[i])
}

/// Maximum of `|x|` over the slice. Exact under any evaluation order.
pub fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Maximum of `f(i)` over `0..len`.
pub fn max_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    (0..len).fold(f64::NEG_INFINITY, |m, i| m.max(f(i)))
}

/// Minimum of `f(i)` over `0..len`.
pub fn min_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    (0..len).fold(f64::INFINITY, |m, i| m.min(f(i)))
}
