//! Seeded random field generators. Coefficients are drawn in a fixed
//! lattice order so a given seed produces the same function on every grid
//! (same box) that can represent the band.

use crate::error::{GzkError, Result};
use crate::field::{Field, Representation};
use crate::grid::GridSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

fn storage_index(j: i64, n: usize) -> usize {
    if j >= 0 {
        j as usize
    } else {
        (j + n as i64) as usize
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniform draws per normal keeps the stream layout fixed
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Band-limited Gaussian random field: Hermitian-symmetric spectrum over the
/// integer index square `|j|, |l| <= band` with decay `(1 + |k|^2)^{-1}`,
/// unit L2 norm. `band` must stay below the Nyquist index on both axes.
pub fn band_limited_field(grid: &GridSpec, seed: u64, band: usize) -> Result<Field> {
    if band >= grid.nx() / 2 || band >= grid.ny() / 2 {
        return Err(GzkError::InvalidParameter(format!(
            "band {band} reaches the Nyquist index on a {}x{} grid",
            grid.nx(),
            grid.ny()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x67_7a_6b_01);
    let mut spec = Field::zeros(grid, Representation::Spectral);
    let b = band as i64;
    for j in -b..=b {
        for l in -b..=b {
            // draw one coefficient per conjugate pair, fixed order
            if j < 0 || (j == 0 && l <= 0) {
                continue;
            }
            let re = gauss(&mut rng);
            let im = gauss(&mut rng);
            let xi = 2.0 * std::f64::consts::PI * j as f64 / grid.lx();
            let eta = 2.0 * std::f64::consts::PI * l as f64 / grid.ly();
            let amp = 1.0 / (1.0 + xi * xi + eta * eta);
            let z = Complex64::new(re, im) * amp;
            let (i0, j0) = (storage_index(j, grid.nx()), storage_index(l, grid.ny()));
            let (i1, j1) = (storage_index(-j, grid.nx()), storage_index(-l, grid.ny()));
            spec.data_mut()[grid.idx(i0, j0)] = z;
            spec.data_mut()[grid.idx(i1, j1)] = z.conj();
        }
    }
    let norm = spec.l2_norm();
    if norm > 0.0 {
        spec.scale(1.0 / norm);
    }
    Ok(spec)
}

/// Random datum of prescribed Sobolev regularity: spectrum
/// `A (1 + |k|^2)^{-(s+1)/2}` with random phases, Hermitian symmetry, and
/// amplitude `A` set so the L2 norm hits `target_l2`. Nyquist rows are left
/// empty. Spectral representation.
pub fn hs_datum(grid: &GridSpec, seed: u64, s: f64, target_l2: f64) -> Result<Field> {
    if !(target_l2 > 0.0) {
        return Err(GzkError::InvalidParameter(format!(
            "target L2 mass must be positive, got {target_l2}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x68_73_64_61);
    let mut spec = Field::zeros(grid, Representation::Spectral);
    let half_x = grid.nx() as i64 / 2;
    let half_y = grid.ny() as i64 / 2;
    for j in -(half_x - 1)..half_x {
        for l in -(half_y - 1)..half_y {
            if j < 0 || (j == 0 && l <= 0) {
                continue;
            }
            let xi = 2.0 * std::f64::consts::PI * j as f64 / grid.lx();
            let eta = 2.0 * std::f64::consts::PI * l as f64 / grid.ly();
            let amp = (1.0 + xi * xi + eta * eta).powf(-(s + 1.0) / 2.0);
            let phase: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let z = Complex64::from_polar(amp, phase);
            let (i0, j0) = (storage_index(j, grid.nx()), storage_index(l, grid.ny()));
            let (i1, j1) = (storage_index(-j, grid.nx()), storage_index(-l, grid.ny()));
            spec.data_mut()[grid.idx(i0, j0)] = z;
            spec.data_mut()[grid.idx(i1, j1)] = z.conj();
        }
    }
    let norm = spec.l2_norm();
    spec.scale(target_l2 / norm);
    Ok(spec)
}
