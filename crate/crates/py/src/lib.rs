//! Python bindings: a thin surface over the gzk core for notebook use.
//!
//! ```python
//! import gzk_py as gz
//! g = gz.Grid(128, 128, 100.53, 100.53)
//! gs = gz.ground_state(2, 1.0, g)
//! ```

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gzk::evolution::{DtPolicy, Integrator, SimulationConfig};
use gzk::field::{Field, Representation};
use gzk::grid::{make_grid, GridSpec};
use gzk::ground_state as gs;
use gzk::ground_state::SolveOptions;
use gzk::propagator;
use gzk::spectral;

fn err(e: gzk::GzkError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Periodic grid `[0, Lx) x [0, Ly)` with nx x ny points.
#[pyclass(name = "Grid", skip_from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: GridSpec,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> PyResult<Self> {
        Ok(PyGrid {
            inner: make_grid(nx, ny, lx, ly).map_err(err)?,
        })
    }

    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }
    #[getter]
    fn ny(&self) -> usize {
        self.inner.ny()
    }
    #[getter]
    fn lx(&self) -> f64 {
        self.inner.lx()
    }
    #[getter]
    fn ly(&self) -> f64 {
        self.inner.ly()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid({}, {}, {:.6}, {:.6})",
            self.inner.nx(),
            self.inner.ny(),
            self.inner.lx(),
            self.inner.ly()
        )
    }
}

/// A real scalar field sample on a grid (held in physical representation).
#[pyclass(name = "Field", skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: Field,
}

#[pymethods]
impl PyField {
    /// Build from a flat row-major (x slow, y fast) list of real values.
    #[staticmethod]
    fn from_values(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        let g = &grid.inner;
        if values.len() != g.nx() * g.ny() {
            return Err(PyValueError::new_err(format!(
                "expected {} values, got {}",
                g.nx() * g.ny(),
                values.len()
            )));
        }
        let data = values
            .into_iter()
            .map(|v| gzk::field::Complex64::new(v, 0.0))
            .collect();
        Ok(PyField {
            inner: Field::from_data(g, Representation::Physical, data).map_err(err)?,
        })
    }

    /// Flat row-major real samples.
    fn values(&self) -> PyResult<Vec<f64>> {
        let p = self.inner.physical().map_err(err)?;
        Ok(p.data().iter().map(|z| z.re).collect())
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: self.inner.grid().clone(),
        }
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    fn linf_norm(&self) -> PyResult<f64> {
        self.inner.linf_norm().map_err(err)
    }

    fn sobolev_norm(&self, s: f64, homogeneous: bool) -> PyResult<f64> {
        spectral::sobolev_norm(&self.inner, s, homogeneous).map_err(err)
    }

    fn __repr__(&self) -> String {
        let g = self.inner.grid();
        format!(
            "Field({}x{}, |u|_L2 = {:.6e})",
            g.nx(),
            g.ny(),
            self.inner.l2_norm()
        )
    }
}

/// Exact linear group: spectrum multiplied by `exp(i t (xi^3 + xi eta^2))`.
#[pyfunction]
fn apply_group(f: &PyField, t: f64) -> PyResult<PyField> {
    Ok(PyField {
        inner: f
            .inner
            .to_spectral()
            .and_then(|s| propagator::apply_group(&s, t))
            .and_then(|g| g.to_physical())
            .map_err(err)?,
    })
}

/// Solitary-wave profile for `-c phi + Lap phi + phi^{k+1}/(k+1) = 0`.
/// Returns `(profile, mass, residual)`.
#[pyfunction]
fn ground_state(k: u32, c: f64, grid: &PyGrid) -> PyResult<(PyField, f64, f64)> {
    let gs = gs::solve_ground_state(k, c, &grid.inner, &SolveOptions::default())
        .map_err(err)?;
    Ok((
        PyField {
            inner: gs.profile.physical().map_err(err)?,
        },
        gs.mass,
        gs.residual,
    ))
}

/// The k = 2 global well-posedness mass threshold on the given grid.
#[pyfunction]
fn critical_mass(grid: &PyGrid) -> PyResult<f64> {
    gs::critical_mass(&grid.inner, &SolveOptions::default()).map_err(err)
}

/// Integrate the full equation to `t_end` with fixed step `dt`
/// (integrating-factor RK4, dealiased). Returns the final state; raises
/// on blow-up detection.
#[pyfunction]
fn evolve(u0: &PyField, k: u32, t_end: f64, dt: f64) -> PyResult<PyField> {
    let cfg = SimulationConfig {
        k,
        grid: u0.inner.grid().clone(),
        t_end,
        dt_policy: DtPolicy::Fixed(dt),
        integrator: Integrator::IfRk4,
        dealias: true,
        snapshot_stride: usize::MAX - 1,
        diagnostic_stride: usize::MAX - 1,
    };
    let out = gzk::evolution::evolve(&u0.inner, &cfg).map_err(err)?;
    if let Some(b) = out.blowup {
        return Err(PyValueError::new_err(format!(
            "gradient overflow at t = {:.6} (last finite |u|_inf = {:.3e})",
            b.last_finite_time, b.last_linf
        )));
    }
    Ok(PyField {
        inner: out.final_state,
    })
}


#[pymodule]
fn gzk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(apply_group, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(critical_mass, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    Ok(())
}
