//! Cached 2D FFT built on rustfft. Plans are memoized per length and
//! direction; transforms are deterministic for a fixed build.

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

static PLANS: Lazy<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANS.lock().unwrap();
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let dir = if forward {
                FftDirection::Forward
            } else {
                FftDirection::Inverse
            };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    // src is rows x cols, dst becomes cols x rows
    for i in 0..rows {
        for j in 0..cols {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}

/// Unnormalized 2D DFT in place. `data` is `nx x ny` row-major (x slow).
/// Forward uses the `e^{-i k x}` convention, inverse the conjugate; the
/// caller applies quadrature normalization.
pub fn fft2(data: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    assert_eq!(data.len(), nx * ny);
    let fy = plan(ny, forward);
    let mut scratch = vec![Complex64::default(); fy.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(ny) {
        fy.process_with_scratch(row, &mut scratch);
    }
    let fx = plan(nx, forward);
    let mut t = vec![Complex64::default(); nx * ny];
    transpose(data, &mut t, nx, ny);
    let mut scratch_x = vec![Complex64::default(); fx.get_inplace_scratch_len()];
    for row in t.chunks_exact_mut(nx) {
        fx.process_with_scratch(row, &mut scratch_x);
    }
    transpose(&t, data, ny, nx);
}
