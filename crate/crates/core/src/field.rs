use crate::error::{GzkError, Result};
use crate::fft::fft2;
use crate::grid::GridSpec;
pub use rustfft::num_complex::Complex64;

/// Which side of the Fourier transform a [`Field`]'s samples live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Physical => "physical",
            Representation::Spectral => "spectral",
        }
    }
}

/// One real scalar field on a [`GridSpec`], stored either as physical samples
/// or as Fourier coefficients.
///
/// The forward transform carries the quadrature weight `dx*dy`, so the
/// spectral Plancherel norm (with measure `1/(lx*ly)` per mode) equals the
/// physical `L^2` quadrature norm.
#[derive(Debug, Clone)]
pub struct Field {
    grid: GridSpec,
    repr: Representation,
    data: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &GridSpec, repr: Representation) -> Field {
        Field {
            grid: grid.clone(),
            repr,
            data: vec![Complex64::default(); grid.len()],
        }
    }

    /// Sample a real-valued function of physical coordinates.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Field {
        let mut data = vec![Complex64::default(); grid.len()];
        for i in 0..grid.nx() {
            for j in 0..grid.ny() {
                let (x, y) = grid.point(i, j);
                data[grid.idx(i, j)] = Complex64::new(f(x, y), 0.0);
            }
        }
        Field {
            grid: grid.clone(),
            repr: Representation::Physical,
            data,
        }
    }

    pub fn from_data(grid: &GridSpec, repr: Representation, data: Vec<Complex64>) -> Result<Field> {
        if data.len() != grid.len() {
            return Err(GzkError::InvalidParameter(format!(
                "data length {} does not match grid {}x{}",
                data.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(Field {
            grid: grid.clone(),
            repr,
            data,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn representation(&self) -> Representation {
        self.repr
    }
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_physical(&self) -> bool {
        self.repr == Representation::Physical
    }
    pub fn is_spectral(&self) -> bool {
        self.repr == Representation::Spectral
    }

    pub fn expect_repr(&self, want: Representation) -> Result<()> {
        if self.repr == want {
            Ok(())
        } else {
            Err(GzkError::Representation {
                expected: want.name(),
                found: self.repr.name(),
            })
        }
    }

    /// Forward transform; errors if the field is already spectral.
    pub fn to_spectral(&self) -> Result<Field> {
        self.expect_repr(Representation::Physical)?;
        let mut data = self.data.clone();
        fft2(&mut data, self.grid.nx(), self.grid.ny(), true);
        let w = self.grid.cell();
        for z in data.iter_mut() {
            *z *= w;
        }
        Ok(Field {
            grid: self.grid.clone(),
            repr: Representation::Spectral,
            data,
        })
    }

    /// Inverse transform; errors if the field is already physical.
    pub fn to_physical(&self) -> Result<Field> {
        self.expect_repr(Representation::Spectral)?;
        let mut data = self.data.clone();
        fft2(&mut data, self.grid.nx(), self.grid.ny(), false);
        let w = 1.0 / (self.grid.lx() * self.grid.ly());
        for z in data.iter_mut() {
            *z *= w;
        }
        Ok(Field {
            grid: self.grid.clone(),
            repr: Representation::Physical,
            data,
        })
    }

    /// The field in spectral representation, transforming if necessary.
    pub fn spectral(&self) -> Result<Field> {
        match self.repr {
            Representation::Spectral => Ok(self.clone()),
            Representation::Physical => self.to_spectral(),
        }
    }

    /// The field in physical representation, transforming if necessary.
    pub fn physical(&self) -> Result<Field> {
        match self.repr {
            Representation::Physical => Ok(self.clone()),
            Representation::Spectral => self.to_physical(),
        }
    }

    /// `L^2` norm: quadrature in physical space, Plancherel in spectral.
    pub fn l2_norm(&self) -> f64 {
        let w = match self.repr {
            Representation::Physical => self.grid.cell(),
            Representation::Spectral => self.grid.spectral_weight(),
        };
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    /// Max of |Re u| over physical samples.
    pub fn linf_norm(&self) -> Result<f64> {
        let p = self.physical()?;
        Ok(p.data
            .iter()
            .map(|z| z.re.abs())
            .fold(0.0f64, |a, b| a.max(b)))
    }

    /// Largest imaginary residue of the physical samples; a valid real field
    /// keeps this at roundoff level.
    pub fn max_imag(&self) -> Result<f64> {
        let p = self.physical()?;
        Ok(p.data
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0f64, |a, b| a.max(b)))
    }

    /// Physical integral of `Re(u)^p` for integer `p >= 1`.
    pub fn integral_power(&self, p: u32) -> Result<f64> {
        let phys = self.physical()?;
        let sum: f64 = phys.data.iter().map(|z| z.re.powi(p as i32)).sum();
        Ok(sum * self.grid.cell())
    }

    pub fn scale(&mut self, a: f64) {
        for z in self.data.iter_mut() {
            *z *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self + a * other`; both fields must share grid and representation.
    pub fn add_scaled(&self, other: &Field, a: f64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(GzkError::GridMismatch);
        }
        other.expect_repr(self.repr)?;
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(x, y)| x + a * y)
            .collect();
        Ok(Field {
            grid: self.grid.clone(),
            repr: self.repr,
            data,
        })
    }

    /// Relative L2 distance `|self - other| / |other|`.
    pub fn rel_l2_distance(&self, other: &Field) -> Result<f64> {
        let d = self.add_scaled(other, -1.0)?;
        let denom = other.l2_norm();
        if denom == 0.0 {
            Ok(d.l2_norm())
        } else {
            Ok(d.l2_norm() / denom)
        }
    }

    /// Multiply the spectrum by a mode-wise function of `(xi, eta)`.
    pub fn multiply_symbol(&self, sym: impl Fn(f64, f64) -> Complex64) -> Result<Field> {
        let mut spec = self.spectral()?;
        for i in 0..self.grid.nx() {
            let xi = self.grid.kx(i);
            for j in 0..self.grid.ny() {
                let eta = self.grid.ky(j);
                spec.data[self.grid.idx(i, j)] *= sym(xi, eta);
            }
        }
        match self.repr {
            Representation::Spectral => Ok(spec),
            Representation::Physical => spec.to_physical(),
        }
    }

    /// Hermitian-symmetry defect of a spectral field:
    /// `max |F(-k) - conj F(k)|` over the lattice (Nyquist rows checked
    /// against themselves).
    pub fn hermitian_defect(&self) -> Result<f64> {
        self.expect_repr(Representation::Spectral)?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut worst = 0.0f64;
        for i in 0..nx {
            let im = (nx - i) % nx;
            for j in 0..ny {
                let jm = (ny - j) % ny;
                let a = self.data[self.grid.idx(i, j)];
                let b = self.data[self.grid.idx(im, jm)];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_concentrates_at_dc() {
        let g = make_grid(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, |_, _| 1.0);
        let s = f.to_spectral().unwrap();
        let dc = s.data()[0];
        let total_area = g.lx() * g.ly();
        assert!((dc.re - total_area).abs() < 1e-10 * total_area);
        for (idx, z) in s.data().iter().enumerate() {
            if idx != 0 {
                assert!(z.norm() < 1e-12 * total_area);
            }
        }
    }

    #[test]
    fn cosine_has_two_conjugate_modes() {
        let g = make_grid(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, |x, _| (x).cos());
        let s = f.to_spectral().unwrap();
        let mut nonzero = 0;
        for i in 0..16 {
            for j in 0..16 {
                let z = s.data()[g.idx(i, j)];
                if z.norm() > 1e-10 {
                    nonzero += 1;
                    assert_eq!(j, 0);
                    assert!((g.kx(i).abs() - 1.0).abs() < 1e-14);
                }
            }
        }
        assert_eq!(nonzero, 2);
        assert!(s.hermitian_defect().unwrap() < 1e-12);
    }

    #[test]
    fn round_trip_identity() {
        let g = make_grid(32, 24, 3.0, 5.0).unwrap();
        let f = Field::from_fn(&g, |x, y| (1.3 * x).sin() * (0.7 * y).cos() + 0.2 * x * y);
        let back = f.to_spectral().unwrap().to_physical().unwrap();
        assert!(f.rel_l2_distance(&back).unwrap() < 1e-13);
        let max_re = back
            .data()
            .iter()
            .map(|z| z.re.abs())
            .fold(0.0f64, f64::max);
        assert!(back.max_imag().unwrap() <= 1e-12 * max_re);
    }

    #[test]
    fn representation_mismatch_rejected() {
        let g = make_grid(8, 8, 1.0, 1.0).unwrap();
        let f = Field::from_fn(&g, |_, _| 1.0);
        assert!(f.to_physical().is_err());
        let s = f.to_spectral().unwrap();
        assert!(s.to_spectral().is_err());
    }

    #[test]
    fn plancherel() {
        let g = make_grid(24, 16, 2.5, 4.0).unwrap();
        let f = Field::from_fn(&g, |x, y| (2.0 * PI * x / 2.5).sin() + 0.3 * (4.0 * PI * y / 4.0).cos());
        let s = f.to_spectral().unwrap();
        assert!((f.l2_norm() - s.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }
}
