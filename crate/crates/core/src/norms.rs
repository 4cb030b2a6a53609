//! Mixed space-time norms `L^p_x L^q_y L^r_T` over uniformly sampled traces.
//!
//! Exponents are always bound to axes: `p` to x, `q` to y, `r` to T; the
//! nesting order only changes which integral sits outside. Joint nestings
//! (`L^p_x L^q_{yT}`, `L^r_T L^q_{xy}`) require the merged exponents to
//! coincide. Infinite exponents take discrete maxima, finite ones use the
//! rectangle rule.

use crate::error::{GzkError, Result};
use crate::field::Field;

/// Uniformly sampled time trace of fields on one grid. Sample `i` carries
/// quadrature weight `dt`, so `n * dt` is the covered time length.
pub struct TimeTrace {
    fields: Vec<Field>,
    dt: f64,
}

impl TimeTrace {
    pub fn new(fields: Vec<Field>, dt: f64) -> Result<TimeTrace> {
        if fields.is_empty() {
            return Err(GzkError::EmptyTrace);
        }
        if !(dt > 0.0) {
            return Err(GzkError::InvalidParameter(format!(
                "trace spacing must be positive, got {dt}"
            )));
        }
        let g = fields[0].grid().clone();
        if fields.iter().any(|f| *f.grid() != g) {
            return Err(GzkError::GridMismatch);
        }
        Ok(TimeTrace { fields, dt })
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn len(&self) -> usize {
        self.fields.len()
    }
    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

/// Nesting order, written outermost first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestOrder {
    /// `L^p_x L^q_y L^r_T`
    XThenYThenT,
    /// `L^r_T L^q_{xy}` (requires p == q)
    TThenXY,
    /// `L^p_x L^q_{yT}` (requires q == r)
    XThenYT,
}

fn lp_done(acc: f64, p: f64) -> f64 {
    if p.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / p)
    }
}

#[inline]
fn lp_step(acc: &mut f64, v: f64, p: f64, weight: f64) {
    if p.is_infinite() {
        if v > *acc {
            *acc = v;
        }
    } else {
        *acc += v.powf(p) * weight;
    }
}

fn check_exponent(e: f64, name: &str) -> Result<()> {
    if e.is_infinite() || e >= 1.0 {
        Ok(())
    } else {
        Err(GzkError::InvalidParameter(format!(
            "exponent {name} = {e} outside [1, inf]"
        )))
    }
}

/// Nested mixed norm of |Re u| over the trace.
pub fn mixed_norm(trace: &TimeTrace, p: f64, q: f64, r: f64, order: NestOrder) -> Result<f64> {
    check_exponent(p, "p")?;
    check_exponent(q, "q")?;
    check_exponent(r, "r")?;
    let g = trace.fields()[0].grid().clone();
    let (nx, ny, nt) = (g.nx(), g.ny(), trace.len());
    let (dx, dy, dt) = (g.dx(), g.dy(), trace.dt());

    // |u| samples, one physical slab per time sample
    let mut slabs: Vec<Vec<f64>> = Vec::with_capacity(nt);
    for f in trace.fields() {
        let phys = f.physical()?;
        slabs.push(phys.data().iter().map(|z| z.re.abs()).collect());
    }

    let norm = match order {
        NestOrder::XThenYThenT => {
            let mut outer = 0.0;
            for i in 0..nx {
                let mut mid = 0.0;
                for j in 0..ny {
                    let mut inner = 0.0;
                    let idx = g.idx(i, j);
                    for slab in &slabs {
                        lp_step(&mut inner, slab[idx], r, dt);
                    }
                    lp_step(&mut mid, lp_done(inner, r), q, dy);
                }
                lp_step(&mut outer, lp_done(mid, q), p, dx);
            }
            lp_done(outer, p)
        }
        NestOrder::TThenXY => {
            if p != q {
                return Err(GzkError::InvalidParameter(format!(
                    "joint L^q_xy nesting needs p == q, got ({p}, {q})"
                )));
            }
            let mut outer = 0.0;
            for slab in &slabs {
                let mut inner = 0.0;
                for &v in slab.iter() {
                    lp_step(&mut inner, v, q, dx * dy);
                }
                lp_step(&mut outer, lp_done(inner, q), r, dt);
            }
            lp_done(outer, r)
        }
        NestOrder::XThenYT => {
            if q != r {
                return Err(GzkError::InvalidParameter(format!(
                    "joint L^q_yT nesting needs q == r, got ({q}, {r})"
                )));
            }
            let mut outer = 0.0;
            for i in 0..nx {
                let mut inner = 0.0;
                for j in 0..ny {
                    let idx = g.idx(i, j);
                    for slab in &slabs {
                        lp_step(&mut inner, slab[idx], q, dy * dt);
                    }
                }
                lp_step(&mut outer, lp_done(inner, q), p, dx);
            }
            lp_done(outer, p)
        }
    };
    Ok(norm)
}
