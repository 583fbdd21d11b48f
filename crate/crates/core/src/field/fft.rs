//! Multi-axis FFT on the periodic grid.
//!
//! Transforms run axis by axis. The contiguous (last) axis is processed in
//! place; strided axes go through a gather / batch-FFT / scatter cycle whose
//! permutations are pure index maps, so every stage parallelizes without
//! affecting results.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::TorusGrid;

type PlanKey = (usize, bool);

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

fn transform_axis(grid: &TorusGrid, data: &mut [Complex64], axis: usize, inverse: bool) {
    let n_axis = grid.points_per_axis;
    let fft = plan(n_axis, inverse);
    let stride = grid.stride(axis);
    if stride == 1 {
        data.par_chunks_mut(n_axis).for_each_init(
            || vec![Complex64::ZERO; fft.get_inplace_scratch_len()],
            |scratch, chunk| fft.process_with_scratch(chunk, scratch),
        );
        return;
    }
    let npoints = grid.npoints;
    let block = stride * n_axis;
    // gather: temp[line * N + j] = data[line-start + j*stride]
    let mut temp = vec![Complex64::ZERO; npoints];
    temp.par_chunks_mut(n_axis).enumerate().for_each(|(line, chunk)| {
        let b = line / stride;
        let off = line % stride;
        let start = b * block + off;
        for (j, slot) in chunk.iter_mut().enumerate() {
            *slot = data[start + j * stride];
        }
    });
    temp.par_chunks_mut(n_axis).for_each_init(
        || vec![Complex64::ZERO; fft.get_inplace_scratch_len()],
        |scratch, chunk| fft.process_with_scratch(chunk, scratch),
    );
    // scatter back: data[p] = temp[line(p) * N + j(p)]
    data.par_chunks_mut(block).enumerate().for_each(|(b, chunk)| {
        for (rem, slot) in chunk.iter_mut().enumerate() {
            let off = rem % stride;
            let j = rem / stride;
            let line = b * stride + off;
            *slot = temp[line * n_axis + j];
        }
    });
}

/// Forward FFT over every axis, unnormalized.
pub fn forward(grid: &TorusGrid, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.npoints);
    for axis in 0..grid.axes() {
        transform_axis(grid, data, axis, false);
    }
}

/// Inverse FFT over every axis, scaled by `1/npoints` so that
/// `inverse(forward(f)) = f`.
pub fn inverse(grid: &TorusGrid, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.npoints);
    for axis in 0..grid.axes() {
        transform_axis(grid, data, axis, true);
    }
    let scale = 1.0 / grid.npoints as f64;
    data.par_iter_mut().for_each(|v| *v *= scale);
}

/// Visits every Fourier mode in storage order, passing the linear index and
/// the signed integer frequency of each axis (Nyquist reported as +N/2; the
/// symbol functions decide how to treat it).
pub fn for_each_mode(grid: &TorusGrid, mut f: impl FnMut(usize, &[i64])) {
    let axes = grid.axes();
    let n_axis = grid.points_per_axis as i64;
    let mut idx = vec![0i64; axes];
    let mut freq = vec![0i64; axes];
    for p in 0..grid.npoints {
        f(p, &freq);
        // odometer increment, last axis fastest
        for a in (0..axes).rev() {
            idx[a] += 1;
            if idx[a] == n_axis {
                idx[a] = 0;
                freq[a] = 0;
            } else {
                freq[a] = if 2 * idx[a] <= n_axis {
                    idx[a]
                } else {
                    idx[a] - n_axis
                };
                break;
            }
        }
    }
}
