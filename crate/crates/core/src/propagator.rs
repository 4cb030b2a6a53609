//! The exact unitary group of `u_t + dx(Laplace u) = 0` and Duhamel
//! integrals against it.
//!
//! On the Fourier side the group is multiplication by `e^{i t w(xi, eta)}`
//! with `w = xi^3 + xi eta^2`. The symbol is odd, so the group maps real
//! fields to real fields.

use crate::error::{GzkError, Result};
use crate::field::{Field, Representation};
use crate::grid::GridSpec;
use rustfft::num_complex::Complex64;

/// Dispersion symbol `w(xi, eta) = xi^3 + xi eta^2` evaluated on a grid's
/// lattice and cached.
#[derive(Debug, Clone)]
pub struct DispersionSymbol {
    grid: GridSpec,
    omega: Vec<f64>,
}

impl DispersionSymbol {
    pub fn new(grid: &GridSpec) -> DispersionSymbol {
        let mut omega = vec![0.0; grid.len()];
        for i in 0..grid.nx() {
            let xi = grid.kx(i);
            for j in 0..grid.ny() {
                let eta = grid.ky(j);
                omega[grid.idx(i, j)] = xi * (xi * xi + eta * eta);
            }
        }
        DispersionSymbol {
            grid: grid.clone(),
            omega,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.omega
    }

    /// Phase factors `e^{i t w}` for one time step, reusable across steps.
    pub fn phases(&self, t: f64) -> Vec<Complex64> {
        self.omega
            .iter()
            .map(|&w| Complex64::from_polar(1.0, t * w))
            .collect()
    }
}

/// Apply `U(t)` to a field; the result keeps the input representation.
pub fn apply_group(f: &Field, t: f64) -> Result<Field> {
    let sym = DispersionSymbol::new(f.grid());
    apply_group_cached(f, t, &sym)
}

/// Same as [`apply_group`] but with a precomputed symbol.
pub fn apply_group_cached(f: &Field, t: f64, sym: &DispersionSymbol) -> Result<Field> {
    if *f.grid() != *sym.grid() {
        return Err(GzkError::GridMismatch);
    }
    let mut spec = f.spectral()?;
    for (z, &w) in spec.data_mut().iter_mut().zip(sym.values()) {
        *z *= Complex64::from_polar(1.0, t * w);
    }
    match f.representation() {
        Representation::Spectral => Ok(spec),
        Representation::Physical => spec.to_physical(),
    }
}

/// Translate the field: result(x, y) = f(x - ax, y - ay), periodic.
pub fn translate(f: &Field, ax: f64, ay: f64) -> Result<Field> {
    f.multiply_symbol(|xi, eta| Complex64::from_polar(1.0, -(xi * ax + eta * ay)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Trapezoid,
    Simpson,
}

/// `z(T) = int_0^T U(T - t') F(t') dt'` by composite quadrature over a
/// uniform time grid `t_i = i * dt`, `i = 0..n-1`, `T = (n-1) * dt`.
///
/// Simpson needs an odd number of samples (an even interval count).
pub fn duhamel(forces: &[Field], dt: f64, rule: Quadrature) -> Result<Field> {
    if forces.len() < 3 {
        return Err(GzkError::InvalidParameter(format!(
            "duhamel needs at least 3 time samples, got {}",
            forces.len()
        )));
    }
    if !(dt > 0.0) {
        return Err(GzkError::InvalidParameter(format!(
            "duhamel spacing must be positive, got {dt}"
        )));
    }
    if rule == Quadrature::Simpson && forces.len() % 2 == 0 {
        return Err(GzkError::InvalidParameter(
            "Simpson rule needs an odd sample count".into(),
        ));
    }
    let g = forces[0].grid().clone();
    if forces.iter().any(|f| *f.grid() != g) {
        return Err(GzkError::GridMismatch);
    }
    let n = forces.len();
    let t_final = (n - 1) as f64 * dt;
    let sym = DispersionSymbol::new(&g);
    let mut acc = Field::zeros(&g, Representation::Spectral);
    for (i, f) in forces.iter().enumerate() {
        let w = match rule {
            Quadrature::Trapezoid => {
                if i == 0 || i == n - 1 {
                    0.5
                } else {
                    1.0
                }
            }
            Quadrature::Simpson => {
                if i == 0 || i == n - 1 {
                    1.0 / 3.0
                } else if i % 2 == 1 {
                    4.0 / 3.0
                } else {
                    2.0 / 3.0
                }
            }
        };
        let t_i = i as f64 * dt;
        let prop = apply_group_cached(&f.spectral()?, t_final - t_i, &sym)?;
        acc = acc.add_scaled(&prop, w * dt)?;
    }
    match forces[0].representation() {
        Representation::Spectral => Ok(acc),
        Representation::Physical => acc.to_physical(),
    }
}
