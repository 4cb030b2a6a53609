//! Empirical probes of the linear-group estimates: for seeded random data
//! the ratio (mixed-norm of the evolved family) / (datum norm) is sampled
//! and reported. These are evidence of boundedness, never proofs.

use crate::ensembles::band_limited_field;
use crate::error::{GzkError, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::norms::{mixed_norm, NestOrder, TimeTrace};
use crate::propagator::{apply_group_cached, DispersionSymbol};
use crate::spectral::{derivative, fractional_derivative, sobolev_norm, Axis};
use rustfft::num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeKind {
    /// local smoothing: `|dx U(t) u0|_{Linf_x L2_{yT}} / |u0|_{L2}`
    Smoothing,
    /// `|D_x^{theta eps/2} U(t) f|_{L^q_T L^p_{xy}} / |f|_{L2}` with
    /// `p = 2/(1-theta)`, `q = 6/(theta(2+eps))`
    Strichartz { theta: f64, eps: f64 },
    /// `|U(t) f|_{L4_x Linf_{yT}} / |(1+|xi|)^{s1} (1+|eta|)^{r1} fhat|_{L2}`
    MaximalL4 { s1: f64, r1: f64 },
    /// `|U(t) f|_{L2_x Linf_{yT}} / |f|_{H^s}`
    MaximalL2 { s: f64 },
}

impl ProbeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeKind::Smoothing => "smoothing",
            ProbeKind::Strichartz { .. } => "strichartz",
            ProbeKind::MaximalL4 { .. } => "maximal_L4",
            ProbeKind::MaximalL2 { .. } => "maximal_L2",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ProbeKind::Smoothing => Ok(()),
            ProbeKind::Strichartz { theta, eps } => {
                if !(0.0..=1.0).contains(&theta) {
                    return Err(GzkError::InvalidParameter(format!(
                        "strichartz theta must be in [0, 1], got {theta}"
                    )));
                }
                if !(0.0..0.5).contains(&eps) {
                    return Err(GzkError::InvalidParameter(format!(
                        "strichartz eps must be in [0, 1/2), got {eps}"
                    )));
                }
                Ok(())
            }
            ProbeKind::MaximalL4 { s1, r1 } => {
                if s1 <= 0.25 || r1 <= 0.5 {
                    return Err(GzkError::InvalidParameter(format!(
                        "maximal_L4 needs s1 > 1/4 and r1 > 1/2, got ({s1}, {r1})"
                    )));
                }
                Ok(())
            }
            ProbeKind::MaximalL2 { s } => {
                if s <= 0.75 {
                    return Err(GzkError::InvalidParameter(format!(
                        "maximal_L2 needs s > 3/4, got {s}"
                    )));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeSample {
    pub seed: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ProbeStats {
    pub kind: ProbeKind,
    pub t_horizon: f64,
    pub samples: Vec<ProbeSample>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Ratio for one datum: evolve `f` under the group, take mixed norms at
/// midpoint time samples over `[0, T]`, divide by the datum-side norm.
pub fn probe_ratio(
    kind: ProbeKind,
    f: &Field,
    t_horizon: f64,
    n_time: usize,
    sym: &DispersionSymbol,
) -> Result<f64> {
    kind.validate()?;
    if !(t_horizon > 0.0 && t_horizon <= 1.0) {
        return Err(GzkError::InvalidParameter(format!(
            "probe horizon must lie in (0, 1], got {t_horizon}"
        )));
    }
    if n_time < 2 {
        return Err(GzkError::InvalidParameter(
            "need at least 2 time samples".into(),
        ));
    }
    if f.l2_norm() == 0.0 {
        return Err(GzkError::InvalidParameter(
            "probe datum must be nonzero".into(),
        ));
    }
    let dt = t_horizon / n_time as f64;
    // datum transformed before transport, when the estimate weights it
    let datum = match kind {
        ProbeKind::Strichartz { theta, eps } => {
            fractional_derivative(&f.spectral()?, 0.5 * theta * eps, Axis::X)?
        }
        _ => f.spectral()?,
    };
    let mut fields = Vec::with_capacity(n_time);
    for m in 0..n_time {
        let t = (m as f64 + 0.5) * dt;
        let ut = apply_group_cached(&datum, t, sym)?;
        let g = match kind {
            ProbeKind::Smoothing => derivative(&ut, Axis::X)?,
            _ => ut,
        };
        fields.push(g.to_physical()?);
    }
    let trace = TimeTrace::new(fields, dt)?;
    let inf = f64::INFINITY;
    let lhs = match kind {
        ProbeKind::Smoothing => mixed_norm(&trace, inf, 2.0, 2.0, NestOrder::XThenYT)?,
        ProbeKind::Strichartz { theta, eps } => {
            let p = if theta >= 1.0 { inf } else { 2.0 / (1.0 - theta) };
            let q = if theta * (2.0 + eps) == 0.0 {
                inf
            } else {
                6.0 / (theta * (2.0 + eps))
            };
            mixed_norm(&trace, p, p, q, NestOrder::TThenXY)?
        }
        ProbeKind::MaximalL4 { .. } => mixed_norm(&trace, 4.0, inf, inf, NestOrder::XThenYT)?,
        ProbeKind::MaximalL2 { .. } => mixed_norm(&trace, 2.0, inf, inf, NestOrder::XThenYT)?,
    };
    let rhs = match kind {
        ProbeKind::Smoothing | ProbeKind::Strichartz { .. } => f.l2_norm(),
        ProbeKind::MaximalL4 { s1, r1 } => f
            .spectral()?
            .multiply_symbol(|xi, eta| {
                Complex64::new((1.0 + xi.abs()).powf(s1) * (1.0 + eta.abs()).powf(r1), 0.0)
            })?
            .l2_norm(),
        ProbeKind::MaximalL2 { s } => sobolev_norm(f, s, false)?,
    };
    Ok(lhs / rhs)
}

/// Sample the ratio over `count` seeded band-limited data
/// (seeds `base_seed .. base_seed + count`).
pub fn estimate_probe(
    kind: ProbeKind,
    grid: &GridSpec,
    t_horizon: f64,
    count: usize,
    base_seed: u64,
    band: usize,
    n_time: usize,
) -> Result<ProbeStats> {
    kind.validate()?;
    if count < 10 {
        return Err(GzkError::InvalidParameter(format!(
            "probe ensembles need count >= 10, got {count}"
        )));
    }
    let sym = DispersionSymbol::new(grid);
    let mut samples = Vec::with_capacity(count);
    let mut max_ratio: f64 = 0.0;
    let mut sum = 0.0;
    for i in 0..count {
        let seed = base_seed + i as u64;
        let f = band_limited_field(grid, seed, band)?;
        let ratio = probe_ratio(kind, &f, t_horizon, n_time, &sym)?;
        if !ratio.is_finite() {
            return Err(GzkError::Solver(format!(
                "non-finite probe ratio for seed {seed}"
            )));
        }
        max_ratio = max_ratio.max(ratio);
        sum += ratio;
        samples.push(ProbeSample { seed, ratio });
    }
    Ok(ProbeStats {
        kind,
        t_horizon,
        samples,
        max_ratio,
        mean_ratio: sum / count as f64,
    })
}
