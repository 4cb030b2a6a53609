//! Spectral multipliers: fractional derivatives, Sobolev norms,
//! dealiasing masks, and the low/high frequency splitting.

use crate::error::{GzkError, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use rustfft::num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// `D^alpha` along one axis: multiplier `|xi|^alpha` (or `|eta|^alpha`).
///
/// For `alpha < 0` every mode with vanishing frequency along the axis is
/// annihilated; `|0|^0` is taken as 1 so `alpha = 0` is the identity.
pub fn fractional_derivative(f: &Field, alpha: f64, axis: Axis) -> Result<Field> {
    if alpha < -1.0 {
        return Err(GzkError::InvalidParameter(format!(
            "fractional order {alpha} below -1"
        )));
    }
    f.multiply_symbol(|xi, eta| {
        let k = match axis {
            Axis::X => xi,
            Axis::Y => eta,
        };
        let m = if k == 0.0 {
            if alpha == 0.0 {
                1.0
            } else if alpha > 0.0 {
                0.0
            } else {
                0.0 // zero mode annihilated for negative powers
            }
        } else {
            k.abs().powf(alpha)
        };
        Complex64::new(m, 0.0)
    })
}

/// First derivative along an axis (multiplier `i*k`, Nyquist mode zeroed).
pub fn derivative(f: &Field, axis: Axis) -> Result<Field> {
    let (kx_nyq, ky_nyq) = (-f.grid().kx_max(), -f.grid().ky_max());
    f.multiply_symbol(|xi, eta| {
        let k = match axis {
            Axis::X => {
                if xi == kx_nyq {
                    0.0
                } else {
                    xi
                }
            }
            Axis::Y => {
                if eta == ky_nyq {
                    0.0
                } else {
                    eta
                }
            }
        };
        Complex64::new(0.0, k)
    })
}

/// Sobolev norm via Plancherel: weight `|k|^{2s}` (homogeneous, zero mode
/// skipped) or `(1 + |k|^2)^s` (inhomogeneous).
pub fn sobolev_norm(f: &Field, s: f64, homogeneous: bool) -> Result<f64> {
    let spec = f.spectral()?;
    let g = f.grid();
    let mut acc = 0.0;
    for i in 0..g.nx() {
        let xi = g.kx(i);
        for j in 0..g.ny() {
            let eta = g.ky(j);
            let k2 = xi * xi + eta * eta;
            let w = if homogeneous {
                if k2 == 0.0 {
                    continue;
                }
                k2.powf(s)
            } else {
                (1.0 + k2).powf(s)
            };
            acc += w * spec.data()[g.idx(i, j)].norm_sqr();
        }
    }
    Ok((acc * g.spectral_weight()).sqrt())
}

/// Homogeneous `H^s` inner product `<f, g>` (real part), zero mode skipped.
pub fn sobolev_inner(f: &Field, g_field: &Field, s: f64) -> Result<f64> {
    if f.grid() != g_field.grid() {
        return Err(GzkError::GridMismatch);
    }
    let a = f.spectral()?;
    let b = g_field.spectral()?;
    let g = f.grid();
    let mut acc = 0.0;
    for i in 0..g.nx() {
        let xi = g.kx(i);
        for j in 0..g.ny() {
            let eta = g.ky(j);
            let k2 = xi * xi + eta * eta;
            if k2 == 0.0 {
                continue;
            }
            let idx = g.idx(i, j);
            acc += k2.powf(s) * (a.data()[idx] * b.data()[idx].conj()).re;
        }
    }
    Ok(acc * g.spectral_weight())
}

/// Which frequency magnitude the sharp cutoff compares against `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffSet {
    /// Full frequency vector: `|(xi, eta)| < N` (default reading).
    #[default]
    Full,
    /// x-frequency only: `|xi| < N` (the literal chi_{|xi|<N}).
    XOnly,
}

/// Split a datum at cutoff `N`: `v0` keeps the modes inside the cutoff set,
/// `w0 = f - v0`. Exact identity in spectral space. Both parts are returned
/// spectral.
pub fn low_high_split(f: &Field, n: f64, cutoff: CutoffSet) -> Result<(Field, Field)> {
    if !(n > 0.0) {
        return Err(GzkError::InvalidParameter(format!(
            "cutoff N must be positive, got {n}"
        )));
    }
    let spec = f.spectral()?;
    let g = f.grid().clone();
    let mut low = spec.clone();
    let mut high = spec;
    for i in 0..g.nx() {
        let xi = g.kx(i);
        for j in 0..g.ny() {
            let eta = g.ky(j);
            let inside = match cutoff {
                CutoffSet::Full => (xi * xi + eta * eta).sqrt() < n,
                CutoffSet::XOnly => xi.abs() < n,
            };
            let idx = g.idx(i, j);
            if inside {
                high.data_mut()[idx] = Complex64::default();
            } else {
                low.data_mut()[idx] = Complex64::default();
            }
        }
    }
    Ok((low, high))
}

/// 2/3-rule mask: zero all modes with integer index `|j| > nx/3` or
/// `|l| > ny/3`.
pub fn apply_dealias_mask(spec: &mut [Complex64], g: &GridSpec) {
    let jx_max = g.nx() / 3;
    let jy_max = g.ny() / 3;
    for i in 0..g.nx() {
        let ji = if i < g.nx() / 2 { i } else { g.nx() - i };
        for j in 0..g.ny() {
            let jj = if j < g.ny() / 2 { j } else { g.ny() - j };
            if ji > jx_max || jj > jy_max {
                spec[g.idx(i, j)] = Complex64::default();
            }
        }
    }
}

/// Fraction of spectral energy outside the 2/3-rule mask; a validity
/// sentinel for higher-degree nonlinearities.
pub fn spectral_tail_fraction(f: &Field) -> Result<f64> {
    let spec = f.spectral()?;
    let g = f.grid();
    let total: f64 = spec.data().iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let mut masked = spec.clone();
    apply_dealias_mask(masked.data_mut(), g);
    let kept: f64 = masked.data().iter().map(|z| z.norm_sqr()).sum();
    Ok((total - kept) / total)
}
