//! Axis-by-axis complex FFTs over `[i1][i2][i3]` arrays.
//!
//! Plans are cached process-wide. Strided axes are gathered into a
//! lane-contiguous scratch array, transformed in batches and scattered back,
//! so every lane is transformed by the same code path regardless of where it
//! sits in the array (slice results do not depend on their neighbours).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

/// Lanes handed to one rayon task.
const LANES_PER_TASK: usize = 64;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan_cache() -> &'static Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let key = (n, direction == FftDirection::Forward);
    let mut cache = plan_cache().lock().expect("fft plan cache poisoned");
    cache
        .entry(key)
        .or_insert_with(|| {
            planner()
                .lock()
                .expect("fft planner poisoned")
                .plan_fft(n, direction)
        })
        .clone()
}

fn run_lanes(buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
    let n = fft.len();
    let scratch_len = fft.get_inplace_scratch_len();
    buf.par_chunks_mut(n * LANES_PER_TASK).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, chunk| fft.process_with_scratch(chunk, scratch),
    );
}

/// Unnormalized transform of every lane along `axis` (0, 1 or 2).
pub(crate) fn transform_axis(
    data: &mut [Complex64],
    dims: [usize; 3],
    axis: usize,
    direction: FftDirection,
) {
    let [n1, n2, n3] = dims;
    assert_eq!(data.len(), n1 * n2 * n3, "array does not match dims");
    let n = dims[axis];
    let fft = plan(n, direction);
    if axis == 2 {
        run_lanes(data, &fft);
        return;
    }
    // Lane l and position i inside the lane map to a flat index.
    let lane_count = data.len() / n;
    let flat = move |lane: usize, i: usize| -> usize {
        if axis == 0 {
            i * n2 * n3 + lane
        } else {
            let (i1, i3) = (lane / n3, lane % n3);
            (i1 * n2 + i) * n3 + i3
        }
    };
    let mut buf = vec![Complex64::default(); data.len()];
    {
        let src: &[Complex64] = data;
        buf.par_chunks_mut(n).enumerate().for_each(|(lane, out)| {
            for (i, v) in out.iter_mut().enumerate() {
                *v = src[flat(lane, i)];
            }
        });
    }
    run_lanes(&mut buf, &fft);
    // Scatter back: iterate destination in contiguous order.
    if axis == 0 {
        let m = n2 * n3;
        data.par_chunks_mut(m).enumerate().for_each(|(i1, plane)| {
            for (lane, v) in plane.iter_mut().enumerate() {
                *v = buf[lane * n + i1];
            }
        });
    } else {
        data.par_chunks_mut(n2 * n3).enumerate().for_each(|(i1, plane)| {
            for i2 in 0..n2 {
                for i3 in 0..n3 {
                    plane[i2 * n3 + i3] = buf[(i1 * n3 + i3) * n + i2];
                }
            }
        });
    }
    debug_assert_eq!(lane_count * n, buf.len());
}

/// Forward transform over the listed axes, normalized by the number of
/// transformed points so the zero mode is the mean.
pub(crate) fn forward(data: &mut [Complex64], dims: [usize; 3], axes: &[usize]) {
    let mut count = 1usize;
    for &a in axes {
        transform_axis(data, dims, a, FftDirection::Forward);
        count *= dims[a];
    }
    let scale = 1.0 / count as f64;
    data.par_iter_mut().for_each(|v| *v *= scale);
}

/// Inverse of [`forward`] over the same axes.
pub(crate) fn inverse(data: &mut [Complex64], dims: [usize; 3], axes: &[usize]) {
    for &a in axes {
        transform_axis(data, dims, a, FftDirection::Inverse);
    }
}

pub(crate) const ALL_AXES: [usize; 3] = [0, 1, 2];
pub(crate) const HORIZONTAL_AXES: [usize; 2] = [0, 1];

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft_axis(data: &[Complex64], dims: [usize; 3], axis: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); data.len()];
        let n = dims[axis];
        for i1 in 0..dims[0] {
            for i2 in 0..dims[1] {
                for i3 in 0..dims[2] {
                    let idx = [i1, i2, i3];
                    let mut acc = Complex64::default();
                    for k in 0..n {
                        let mut src = idx;
                        src[axis] = k;
                        let phase =
                            -2.0 * std::f64::consts::PI * (k * idx[axis]) as f64 / n as f64;
                        acc += data[(src[0] * dims[1] + src[1]) * dims[2] + src[2]]
                            * Complex64::from_polar(1.0, phase);
                    }
                    out[(i1 * dims[1] + i2) * dims[2] + i3] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn each_axis_matches_naive_dft() {
        let dims = [4, 8, 2];
        let data: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        for axis in 0..3 {
            let mut fast = data.clone();
            transform_axis(&mut fast, dims, axis, FftDirection::Forward);
            let slow = naive_dft_axis(&data, dims, axis);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12, "axis {axis}");
            }
        }
    }

    #[test]
    fn forward_inverse_round_trip() {
        let dims = [8, 4, 16];
        let data: Vec<Complex64> = (0..512)
            .map(|i| Complex64::new((i as f64).sqrt().sin(), 0.0))
            .collect();
        let mut work = data.clone();
        forward(&mut work, dims, &ALL_AXES);
        inverse(&mut work, dims, &ALL_AXES);
        for (a, b) in work.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
