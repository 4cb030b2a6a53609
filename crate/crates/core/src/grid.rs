use crate::error::{GzkError, Result};
use std::f64::consts::PI;

/// Periodic 2D grid: `nx * ny` points on a box of side lengths `lx * ly`,
/// together with the wavenumber lattices used by every spectral operation.
///
/// Physical points are `x_i = i * dx`, `y_j = j * dy` with `dx = lx / nx`.
/// Wavenumbers follow FFT storage order: index `i` carries
/// `xi = 2*pi*j/lx` with `j = i` for `i < nx/2` and `j = i - nx` otherwise,
/// so the lattice is `{-nx/2, ..., nx/2 - 1}` scaled by `2*pi/lx`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

/// Build a grid, validating the resolution and box-size preconditions.
pub fn make_grid(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<GridSpec> {
    if nx < 8 || ny < 8 {
        return Err(GzkError::InvalidGrid(format!(
            "resolution {nx}x{ny} too small (need >= 8 per axis)"
        )));
    }
    if nx % 2 != 0 || ny % 2 != 0 {
        return Err(GzkError::InvalidGrid(format!(
            "resolution {nx}x{ny} must be even"
        )));
    }
    if !(lx > 0.0) || !(ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
        return Err(GzkError::InvalidGrid(format!(
            "box sides must be positive and finite, got {lx} x {ly}"
        )));
    }
    let kx = (0..nx).map(|i| 2.0 * PI * signed_index(i, nx) / lx).collect();
    let ky = (0..ny).map(|j| 2.0 * PI * signed_index(j, ny) / ly).collect();
    Ok(GridSpec {
        nx,
        ny,
        lx,
        ly,
        kx,
        ky,
    })
}

fn signed_index(i: usize, n: usize) -> f64 {
    if i < n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

impl GridSpec {
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// x-wavenumber at storage index `i`.
    pub fn kx(&self, i: usize) -> f64 {
        self.kx[i]
    }
    /// y-wavenumber at storage index `j`.
    pub fn ky(&self, j: usize) -> f64 {
        self.ky[j]
    }
    pub fn kx_slice(&self) -> &[f64] {
        &self.kx
    }
    pub fn ky_slice(&self) -> &[f64] {
        &self.ky
    }

    /// Physical coordinate of grid point `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.dx(), j as f64 * self.dy())
    }

    /// Box center, where solitary-wave profiles are placed.
    pub fn center(&self) -> (f64, f64) {
        (self.lx / 2.0, self.ly / 2.0)
    }

    /// Storage index of point `(i, j)`: row-major with x as the slow axis.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Largest wavenumber magnitude representable along x.
    pub fn kx_max(&self) -> f64 {
        PI * self.nx as f64 / self.lx
    }
    pub fn ky_max(&self) -> f64 {
        PI * self.ny as f64 / self.ly
    }

    /// Quadrature weight of one grid cell.
    pub fn cell(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Spectral Plancherel weight: `sum |f_hat|^2 * spectral_weight()` equals
    /// the physical `L^2` norm squared under the dx*dy-weighted transform.
    pub fn spectral_weight(&self) -> f64 {
        1.0 / (self.lx * self.ly)
    }
}
