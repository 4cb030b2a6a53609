//! A pseudo-spectral laboratory for the 2D generalized Zakharov-Kuznetsov
//! equation `u_t + dx(Lap u) + u^k u_x = 0` on a periodic box: exact linear
//! group, solitary-wave profiles, conserved-quantity evolution, mixed-norm
//! estimate probes, and scripted experiments (scaling, ill-posedness,
//! critical mass, high/low frequency splitting).

pub mod config;
pub mod ensembles;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod grid;
pub mod ground_state;
pub mod norms;
pub mod probes;
pub mod propagator;
pub mod snapshot;
pub mod spectral;

pub use error::{GzkError, Result};

/// Critical Sobolev index `s_c(k) = 1 - 2/k` of the scaling symmetry.
pub fn critical_index(k: u32) -> f64 {
    1.0 - 2.0 / k as f64
}
