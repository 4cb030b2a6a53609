//! Nonlinear time integration of `u_t + dx(Lap u) + u^k u_x = 0` for any
//! k >= 1: integrating-factor RK4 (default), exponential RK4, and Strang
//! splitting, plus conserved-quantity diagnostics, the small-data energy
//! bootstrap report, and the coupled low/high (v, w, z) system.

use crate::error::{GzkError, Result};
use crate::field::{Field, Representation};
use crate::grid::GridSpec;
use crate::propagator::DispersionSymbol;
use crate::spectral::{apply_dealias_mask, derivative, sobolev_norm, Axis};
use rustfft::num_complex::Complex64;

/// Heuristic adaptive-step exponent scale.
pub const TIME_SCALE_GAMMA: f64 = 5.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    IfRk4,
    EtdRk4,
    Strang,
}

impl Integrator {
    pub fn name(self) -> &'static str {
        match self {
            Integrator::IfRk4 => "ifrk4",
            Integrator::EtdRk4 => "etdrk4",
            Integrator::Strang => "strang",
        }
    }

    pub fn parse(s: &str) -> Result<Integrator> {
        match s {
            "ifrk4" => Ok(Integrator::IfRk4),
            "etdrk4" => Ok(Integrator::EtdRk4),
            "strang" => Ok(Integrator::Strang),
            other => Err(GzkError::InvalidParameter(format!(
                "unknown integrator '{other}' (expected ifrk4|etdrk4|strang)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = dt_ref * (1 + |u|_{H^s})^{-2/gamma}` with gamma = 5/12,
    /// re-evaluated each step. A heuristic, not a stability proof.
    Cfl { dt_ref: f64, s: f64 },
}

impl DtPolicy {
    fn base_dt(&self) -> f64 {
        match *self {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Cfl { dt_ref, .. } => dt_ref,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub k: u32,
    pub grid: GridSpec,
    pub t_end: f64,
    pub dt_policy: DtPolicy,
    pub integrator: Integrator,
    pub dealias: bool,
    pub snapshot_stride: usize,
    pub diagnostic_stride: usize,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(GzkError::InvalidParameter("k must be >= 1".into()));
        }
        if !(self.t_end > 0.0) {
            return Err(GzkError::InvalidParameter(format!(
                "T_end must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.dt_policy.base_dt() > 0.0) {
            return Err(GzkError::InvalidParameter("dt must be positive".into()));
        }
        if self.snapshot_stride < 1 || self.diagnostic_stride < 1 {
            return Err(GzkError::InvalidParameter("strides must be >= 1".into()));
        }
        Ok(())
    }
}

/// `u^k u_x` in conservative form `dx(u^{k+1})/(k+1)`, returned physical
/// and real; with `dealias` the product is filtered by the 2/3-rule mask.
pub fn nonlinear_term(u: &Field, k: u32, dealias: bool) -> Result<Field> {
    let spec = nl_spectral(&u.physical()?, k, dealias)?;
    let mut out = spec.to_physical()?;
    for z in out.data_mut().iter_mut() {
        *z = Complex64::new(z.re, 0.0);
    }
    Ok(out)
}

/// `u^k u_x` computed as the plain product `u^k * (u_x)` (non-conservative
/// discretization), for cross-checking the conservative form.
pub fn nonlinear_term_direct(u: &Field, k: u32, dealias: bool) -> Result<Field> {
    if k < 1 {
        return Err(GzkError::InvalidParameter("k must be >= 1".into()));
    }
    let phys = u.physical()?;
    let ux = derivative(&phys, Axis::X)?;
    let g = phys.grid();
    let mut prod = Field::zeros(g, Representation::Physical);
    for idx in 0..prod.data().len() {
        let v = phys.data()[idx].re;
        prod.data_mut()[idx] = Complex64::new(v.powi(k as i32) * ux.data()[idx].re, 0.0);
    }
    if dealias {
        let mut spec = prod.to_spectral()?;
        apply_dealias_mask(spec.data_mut(), g);
        prod = spec.to_physical()?;
        for z in prod.data_mut().iter_mut() {
            *z = Complex64::new(z.re, 0.0);
        }
    }
    Ok(prod)
}

/// Spectral coefficients of `u^k u_x` from a physical input.
fn nl_spectral(phys: &Field, k: u32, dealias: bool) -> Result<Field> {
    if k < 1 {
        return Err(GzkError::InvalidParameter("k must be >= 1".into()));
    }
    let g = phys.grid();
    let mut p = Field::zeros(g, Representation::Physical);
    let inv = 1.0 / (k as f64 + 1.0);
    for (dst, src) in p.data_mut().iter_mut().zip(phys.data().iter()) {
        *dst = Complex64::new(src.re.powi(k as i32 + 1) * inv, 0.0);
    }
    let mut spec = p.to_spectral()?;
    let nyq_x = g.nx() / 2;
    for i in 0..g.nx() {
        let xi = if i == nyq_x {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, g.kx(i))
        };
        for j in 0..g.ny() {
            let idx = g.idx(i, j);
            spec.data_mut()[idx] *= xi;
        }
    }
    if dealias {
        apply_dealias_mask(spec.data_mut(), g);
    }
    Ok(spec)
}

// ---------------------------------------------------------------------------
// Stepper

fn mul(a: &Field, ph: &[Complex64]) -> Field {
    let mut out = a.clone();
    for (z, p) in out.data_mut().iter_mut().zip(ph.iter()) {
        *z *= p;
    }
    out
}

fn check_finite(u: &Field) -> bool {
    u.data().iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

struct EtdCoeffs {
    dt: f64,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

/// One evolution's integration state: cached dispersion phases and, for the
/// exponential scheme, contour-averaged phi-function weights.
pub struct Stepper {
    cfg: SimulationConfig,
    sym: DispersionSymbol,
    // IFRK4/Strang cache: phases for dt/2 and dt at the cached step size
    if_dt: f64,
    e_half: Vec<Complex64>,
    e_full: Vec<Complex64>,
    etd: Option<EtdCoeffs>,
}

impl Stepper {
    pub fn new(cfg: SimulationConfig) -> Result<Stepper> {
        cfg.validate()?;
        let sym = DispersionSymbol::new(&cfg.grid);
        Ok(Stepper {
            cfg,
            sym,
            if_dt: f64::NAN,
            e_half: Vec::new(),
            e_full: Vec::new(),
            etd: None,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.cfg
    }

    fn ensure_phases(&mut self, dt: f64) {
        if self.if_dt == dt {
            return;
        }
        self.e_half = self.sym.phases(0.5 * dt);
        self.e_full = self.sym.phases(dt);
        self.if_dt = dt;
    }

    /// Kassam-Trefethen contour averages of the phi-function weights over
    /// 64 points on the unit circle around each (purely imaginary) `L dt`.
    fn ensure_etd(&mut self, dt: f64) {
        if self.etd.as_ref().map(|c| c.dt) == Some(dt) {
            return;
        }
        const M: usize = 64;
        let omega = self.sym.values();
        let n = omega.len();
        let mut q = vec![Complex64::default(); n];
        let mut f1 = vec![Complex64::default(); n];
        let mut f2 = vec![Complex64::default(); n];
        let mut f3 = vec![Complex64::default(); n];
        let mut e_full = vec![Complex64::default(); n];
        let mut e_half = vec![Complex64::default(); n];
        // L is purely imaginary, so average over the full unit circle
        // (the half-circle/real-part shortcut needs a real spectrum)
        let pts: Vec<Complex64> = (0..M)
            .map(|r| {
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (r as f64 + 0.5) / M as f64)
            })
            .collect();
        for idx in 0..n {
            let l = Complex64::new(0.0, omega[idx] * dt);
            e_full[idx] = l.exp();
            e_half[idx] = (0.5 * l).exp();
            let mut sq = Complex64::default();
            let mut s1 = Complex64::default();
            let mut s2 = Complex64::default();
            let mut s3 = Complex64::default();
            for r in &pts {
                let z = l + r;
                let ez = z.exp();
                let z2 = z * z;
                let z3 = z2 * z;
                sq += ((0.5 * z).exp() - 1.0) / z;
                s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
                s2 += (2.0 + z + ez * (z - 2.0)) / z3;
                s3 += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
            }
            let m = M as f64;
            q[idx] = dt * Complex64::new(sq.re / m, sq.im / m);
            f1[idx] = dt * Complex64::new(s1.re / m, s1.im / m);
            f2[idx] = dt * Complex64::new(s2.re / m, s2.im / m);
            f3[idx] = dt * Complex64::new(s3.re / m, s3.im / m);
        }
        self.etd = Some(EtdCoeffs {
            dt,
            e_full,
            e_half,
            q,
            f1,
            f2,
            f3,
        });
    }

    fn nl(&self, u_spec: &Field) -> Result<Field> {
        // RHS sign: u_t = -dx(Lap u) - u^k u_x, linear part handled exactly
        let phys = u_spec.to_physical()?;
        Ok(nl_spectral(&phys, self.cfg.k, self.cfg.dealias)?.scaled(-1.0))
    }

    /// Advance one step of size `dt` (negative `dt` steps the reversed
    /// equation). Input and output are spectral.
    pub fn step(&mut self, u: &Field, dt: f64) -> Result<Field> {
        if dt == 0.0 || !dt.is_finite() {
            return Err(GzkError::InvalidParameter(format!("bad step size {dt}")));
        }
        let u = u.spectral()?;
        let out = match self.cfg.integrator {
            Integrator::IfRk4 => self.step_ifrk4(&u, dt)?,
            Integrator::EtdRk4 => self.step_etdrk4(&u, dt)?,
            Integrator::Strang => self.step_strang(&u, dt)?,
        };
        if !check_finite(&out) {
            return Err(GzkError::Solver("non-finite state after step".into()));
        }
        Ok(out)
    }

    fn step_ifrk4(&mut self, u: &Field, dt: f64) -> Result<Field> {
        self.ensure_phases(dt);
        let e = self.e_half.clone();
        let e2 = self.e_full.clone();
        let k1 = self.nl(u)?.scaled(dt);
        let k2 = self.nl(&mul(&u.add_scaled(&k1, 0.5)?, &e))?.scaled(dt);
        let eu = mul(u, &e);
        let k3 = self.nl(&eu.add_scaled(&k2, 0.5)?)?.scaled(dt);
        let e2u = mul(u, &e2);
        let k4 = self.nl(&e2u.add_scaled(&mul(&k3, &e), 1.0)?)?.scaled(dt);
        // u' = E^2 u + (E^2 k1 + 2E(k2 + k3) + k4)/6
        let mid = k2.add_scaled(&k3, 1.0)?;
        e2u.add_scaled(&mul(&k1, &e2), 1.0 / 6.0)?
            .add_scaled(&mul(&mid, &e), 2.0 / 6.0)?
            .add_scaled(&k4, 1.0 / 6.0)
    }

    fn step_etdrk4(&mut self, u: &Field, dt: f64) -> Result<Field> {
        self.ensure_etd(dt);
        let c = self.etd.as_ref().unwrap();
        let (e, e2) = (c.e_full.clone(), c.e_half.clone());
        let (q, f1, f2, f3) = (c.q.clone(), c.f1.clone(), c.f2.clone(), c.f3.clone());
        let nu = self.nl(u)?;
        let a = mul(u, &e2).add_scaled(&mul(&nu, &q), 1.0)?;
        let na = self.nl(&a)?;
        let b = mul(u, &e2).add_scaled(&mul(&na, &q), 1.0)?;
        let nb = self.nl(&b)?;
        let cc = mul(&a, &e2)
            .add_scaled(&mul(&nb.scaled(2.0).add_scaled(&nu, -1.0)?, &q), 1.0)?;
        let nc = self.nl(&cc)?;
        let mid = na.add_scaled(&nb, 1.0)?;
        mul(u, &e)
            .add_scaled(&mul(&nu, &f1), 1.0)?
            .add_scaled(&mul(&mid, &f2), 2.0)?
            .add_scaled(&mul(&nc, &f3), 1.0)
    }

    /// Strang: half-step exact linear flow, full RK4 step of the pure
    /// nonlinear sub-flow, half-step linear.
    fn step_strang(&mut self, u: &Field, dt: f64) -> Result<Field> {
        self.ensure_phases(dt);
        let e = self.e_half.clone();
        let half = mul(u, &e);
        let k1 = self.nl(&half)?;
        let k2 = self.nl(&half.add_scaled(&k1, 0.5 * dt)?)?;
        let k3 = self.nl(&half.add_scaled(&k2, 0.5 * dt)?)?;
        let k4 = self.nl(&half.add_scaled(&k3, dt)?)?;
        let stepped = half
            .add_scaled(&k1, dt / 6.0)?
            .add_scaled(&k2, dt / 3.0)?
            .add_scaled(&k3, dt / 3.0)?
            .add_scaled(&k4, dt / 6.0)?;
        Ok(mul(&stepped, &e))
    }

    fn next_dt(&self, u: &Field, remaining: f64) -> Result<f64> {
        let dt = match self.cfg.dt_policy {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Cfl { dt_ref, s } => {
                let h = sobolev_norm(u, s, false)?;
                dt_ref * (1.0 + h).powf(-2.0 / TIME_SCALE_GAMMA)
            }
        };
        Ok(dt.min(remaining))
    }
}

// ---------------------------------------------------------------------------
// Diagnostics

#[derive(Debug, Clone, Copy)]
pub struct DiagnosticRow {
    pub t: f64,
    pub i1: f64,
    pub i2: f64,
    pub h1: f64,
    pub linf: f64,
    pub grad_l2: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ConservedDiagnostics {
    pub rows: Vec<DiagnosticRow>,
}

impl ConservedDiagnostics {
    pub fn push_sample(&mut self, t: f64, u: &Field, k: u32) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if t <= last.t {
                return Err(GzkError::InvalidParameter(
                    "diagnostic times must be strictly increasing".into(),
                ));
            }
        }
        let phys = u.physical()?;
        let i1 = phys.l2_norm().powi(2);
        let gx = derivative(&phys, Axis::X)?.l2_norm().powi(2);
        let gy = derivative(&phys, Axis::Y)?.l2_norm().powi(2);
        let grad2 = gx + gy;
        let pot = phys.integral_power(k + 2)?;
        let i2 = grad2 - 2.0 * pot / ((k as f64 + 1.0) * (k as f64 + 2.0));
        self.rows.push(DiagnosticRow {
            t,
            i1,
            i2,
            h1: (i1 + grad2).sqrt(),
            linf: phys.linf_norm()?,
            grad_l2: grad2.sqrt(),
        });
        Ok(())
    }

    /// Max relative drift of I1 from its initial value.
    pub fn i1_drift(&self) -> f64 {
        self.relative_drift(|r| r.i1)
    }

    /// Max drift of I2, relative to max(1, |I2(0)|).
    pub fn i2_drift(&self) -> f64 {
        let first = match self.rows.first() {
            Some(r) => r.i2,
            None => return 0.0,
        };
        let denom = first.abs().max(1.0);
        self.rows
            .iter()
            .map(|r| (r.i2 - first).abs() / denom)
            .fold(0.0, f64::max)
    }

    fn relative_drift(&self, get: impl Fn(&DiagnosticRow) -> f64) -> f64 {
        let first = match self.rows.first() {
            Some(r) => get(r),
            None => return 0.0,
        };
        self.rows
            .iter()
            .map(|r| (get(r) - first).abs() / first.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    pub fn write_csv(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "t,I1,I2,H1,Linf,grad_L2")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                r.t, r.i1, r.i2, r.h1, r.linf, r.grad_l2
            )?;
        }
        Ok(())
    }
}

/// Structured blow-up outcome: the run stopped early, reporting the last
/// finite time and amplitude. Never an error.
#[derive(Debug, Clone, Copy)]
pub struct BlowUpReport {
    pub last_finite_time: f64,
    pub last_linf: f64,
}

pub struct EvolveResult {
    /// `(t, state)` snapshots at the configured stride, physical repr,
    /// always including t = 0 and the final state.
    pub snapshots: Vec<(f64, Field)>,
    pub diagnostics: ConservedDiagnostics,
    pub blowup: Option<BlowUpReport>,
    pub final_state: Field,
    pub final_time: f64,
}

pub const BLOWUP_LINF: f64 = 1e6;

pub fn evolve(u0: &Field, cfg: &SimulationConfig) -> Result<EvolveResult> {
    cfg.validate()?;
    if u0.grid() != &cfg.grid {
        return Err(GzkError::GridMismatch);
    }
    if !check_finite(u0) {
        return Err(GzkError::InvalidParameter("non-finite initial datum".into()));
    }
    let mut stepper = Stepper::new(cfg.clone())?;
    let mut u = u0.spectral()?;
    let mut t = 0.0;
    let mut diagnostics = ConservedDiagnostics::default();
    diagnostics.push_sample(t, &u, cfg.k)?;
    let mut snapshots = vec![(t, u.to_physical()?)];
    let mut blowup = None;
    let mut n = 0usize;
    while t < cfg.t_end - 1e-12 * cfg.t_end {
        let dt = stepper.next_dt(&u, cfg.t_end - t)?;
        match stepper.step(&u, dt) {
            Ok(next) => {
                let linf = next.to_physical()?.linf_norm()?;
                if !linf.is_finite() || linf > BLOWUP_LINF {
                    blowup = Some(BlowUpReport {
                        last_finite_time: t,
                        last_linf: diagnostics.rows.last().map(|r| r.linf).unwrap_or(0.0),
                    });
                    break;
                }
                u = next;
            }
            Err(_) => {
                blowup = Some(BlowUpReport {
                    last_finite_time: t,
                    last_linf: diagnostics.rows.last().map(|r| r.linf).unwrap_or(0.0),
                });
                break;
            }
        }
        t += dt;
        n += 1;
        let done = t >= cfg.t_end - 1e-12 * cfg.t_end;
        if n % cfg.diagnostic_stride == 0 || done {
            diagnostics.push_sample(t, &u, cfg.k)?;
        }
        if n % cfg.snapshot_stride == 0 || done {
            snapshots.push((t, u.to_physical()?));
        }
    }
    let final_state = u.to_physical()?;
    if snapshots.last().map(|(st, _)| *st) != Some(t) {
        snapshots.push((t, final_state.clone()));
    }
    Ok(EvolveResult {
        snapshots,
        diagnostics,
        blowup,
        final_state,
        final_time: t,
    })
}

// ---------------------------------------------------------------------------
// Energy bootstrap

/// Evaluates the continuation inequality `X(t) <= C0 + c_gn I1(0) X(t)^{k/2}`
/// for `X = |u|_{H^1}^2`, with the largest Gagliardo-Nirenberg ratio
/// observed along the run substituted for the constant.
#[derive(Debug, Clone)]
pub struct BootstrapReport {
    /// C0 = I1(0) + I2(0)
    pub c0: f64,
    /// max over samples of `int u^{k+2} / (|u|_{L2}^2 |grad u|_{L2}^k)`
    pub max_gn_ratio: f64,
    pub sup_x: f64,
    /// min over samples of `C0 + c_gn I1(0) X^{k/2} - X`
    pub min_margin: f64,
    /// sup_t |u|_{H1} / |u0|_{H1}
    pub h1_growth: f64,
}

pub fn energy_bootstrap_report(
    diag: &ConservedDiagnostics,
    k: u32,
) -> Result<BootstrapReport> {
    if k < 3 {
        return Err(GzkError::InvalidParameter(
            "bootstrap report applies to supercritical k >= 3".into(),
        ));
    }
    let first = diag
        .rows
        .first()
        .ok_or(GzkError::EmptyTrace)?;
    let c0 = first.i1 + first.i2;
    let kf = k as f64;
    let pot_coeff = (kf + 1.0) * (kf + 2.0) / 2.0;
    let mut max_ratio: f64 = 0.0;
    for r in &diag.rows {
        // int u^{k+2} recovered from |grad u|^2 - I2
        let pot = pot_coeff * (r.grad_l2.powi(2) - r.i2);
        let denom = r.i1 * r.grad_l2.powf(kf);
        if denom > 0.0 {
            max_ratio = max_ratio.max(pot.abs() / denom);
        }
    }
    let i1_0 = first.i1;
    let mut min_margin = f64::INFINITY;
    let mut sup_x: f64 = 0.0;
    for r in &diag.rows {
        let x = r.h1.powi(2);
        sup_x = sup_x.max(x);
        let margin = c0 + max_ratio * i1_0 * x.powf(kf / 2.0) - x;
        min_margin = min_margin.min(margin);
    }
    Ok(BootstrapReport {
        c0,
        max_gn_ratio: max_ratio,
        sup_x,
        min_margin,
        h1_growth: diag
            .rows
            .iter()
            .map(|r| r.h1)
            .fold(0.0, f64::max)
            / first.h1.max(f64::MIN_POSITIVE),
    })
}

// ---------------------------------------------------------------------------
// Coupled low/high system

/// Which sign the accumulated Duhamel integral carries.
/// `SignCorrect` uses `z(t) = -int_0^t U(t-s) F(s) ds`, the convention under
/// which the reconstruction `u(T) = v(T) + U(T) w0 + z(T)` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DuhamelConvention {
    SignCorrect,
    PlusSign,
}

#[derive(Debug, Clone)]
pub struct SplitPair {
    pub n_cutoff: f64,
    pub v: Field,
    pub w: Field,
    /// accumulated Duhamel term
    pub z: Field,
    pub t: f64,
}

impl SplitPair {
    pub fn new(n_cutoff: f64, v0: &Field, w0: &Field) -> Result<SplitPair> {
        if v0.grid() != w0.grid() {
            return Err(GzkError::GridMismatch);
        }
        Ok(SplitPair {
            n_cutoff,
            v: v0.spectral()?,
            w: w0.spectral()?,
            z: Field::zeros(v0.grid(), Representation::Spectral),
            t: 0.0,
        })
    }

    pub fn sum(&self) -> Result<Field> {
        self.v.add_scaled(&self.w, 1.0)
    }
}

pub struct CoupledResult {
    pub trajectory: Vec<SplitPair>,
    pub final_pair: SplitPair,
    pub blowup: Option<BlowUpReport>,
}

/// Advance the coupled system
/// `v_t + dx(Lap v) + v^2 v_x = 0`,
/// `w_t + dx(Lap w) + F(v, w) = 0` with
/// `F = (v+w)^2 (v+w)_x - v^2 v_x`, accumulating
/// `z` by per-step trapezoid increments
/// `z_{n+1} = U(dt) z_n -+ (dt/2)(U(dt) F_n + F_{n+1})`.
/// Both components use the integrating-factor RK4 stages in lockstep so the
/// stage-wise identity `(v + w) = unsplit u` holds to roundoff.
pub fn coupled_evolve(
    pair: &SplitPair,
    cfg: &SimulationConfig,
    convention: DuhamelConvention,
) -> Result<CoupledResult> {
    cfg.validate()?;
    if cfg.k != 2 {
        return Err(GzkError::InvalidParameter(
            "the coupled low/high system is specific to k = 2".into(),
        ));
    }
    if pair.v.grid() != &cfg.grid {
        return Err(GzkError::GridMismatch);
    }
    let dt = match cfg.dt_policy {
        DtPolicy::Fixed(dt) => dt,
        DtPolicy::Cfl { .. } => {
            return Err(GzkError::InvalidParameter(
                "coupled evolution requires a fixed step".into(),
            ))
        }
    };
    if cfg.integrator != Integrator::IfRk4 {
        return Err(GzkError::InvalidParameter(
            "coupled evolution supports the integrating-factor scheme only".into(),
        ));
    }
    let sym = DispersionSymbol::new(&cfg.grid);
    let sign = match convention {
        DuhamelConvention::SignCorrect => -1.0,
        DuhamelConvention::PlusSign => 1.0,
    };

    // spectral of +u^2 u_x
    let nl = |u: &Field| -> Result<Field> {
        nl_spectral(&u.to_physical()?, 2, cfg.dealias)
    };
    // (N_v, N_w) = (-(v^2 v_x), -F) with F = (v+w)^2(v+w)_x - v^2 v_x
    let rhs = |v: &Field, w: &Field| -> Result<(Field, Field)> {
        let nv = nl(v)?;
        let nvw = nl(&v.add_scaled(w, 1.0)?)?;
        let f = nvw.add_scaled(&nv, -1.0)?;
        Ok((nv.scaled(-1.0), f.scaled(-1.0)))
    };

    let e = sym.phases(0.5 * dt);
    let e2 = sym.phases(dt);
    let n_steps = (cfg.t_end / dt).round().max(1.0) as usize;
    if ((n_steps as f64) * dt - cfg.t_end).abs() > 1e-9 * cfg.t_end {
        return Err(GzkError::InvalidParameter(
            "T_end must be an integer multiple of dt for the coupled system".into(),
        ));
    }

    let mut v = pair.v.spectral()?;
    let mut w = pair.w.spectral()?;
    let mut z = pair.z.spectral()?;
    let mut t = pair.t;
    let mut trajectory = vec![SplitPair {
        n_cutoff: pair.n_cutoff,
        v: v.clone(),
        w: w.clone(),
        z: z.clone(),
        t,
    }];
    let mut blowup = None;

    // F at the current step start (for the trapezoid increment)
    let mut f_n = {
        let (_, nw) = rhs(&v, &w)?;
        nw.scaled(-1.0)
    };

    for step_idx in 0..n_steps {
        let (k1v, k1w) = {
            let (a, b) = rhs(&v, &w)?;
            (a.scaled(dt), b.scaled(dt))
        };
        let av = mul(&v.add_scaled(&k1v, 0.5)?, &e);
        let aw = mul(&w.add_scaled(&k1w, 0.5)?, &e);
        let (k2v, k2w) = {
            let (a, b) = rhs(&av, &aw)?;
            (a.scaled(dt), b.scaled(dt))
        };
        let ev = mul(&v, &e);
        let ew = mul(&w, &e);
        let bv = ev.add_scaled(&k2v, 0.5)?;
        let bw = ew.add_scaled(&k2w, 0.5)?;
        let (k3v, k3w) = {
            let (a, b) = rhs(&bv, &bw)?;
            (a.scaled(dt), b.scaled(dt))
        };
        let e2v = mul(&v, &e2);
        let e2w = mul(&w, &e2);
        let cv = e2v.add_scaled(&mul(&k3v, &e), 1.0)?;
        let cw = e2w.add_scaled(&mul(&k3w, &e), 1.0)?;
        let (k4v, k4w) = {
            let (a, b) = rhs(&cv, &cw)?;
            (a.scaled(dt), b.scaled(dt))
        };
        let combine = |u2: &Field,
                       k1: &Field,
                       k2: &Field,
                       k3: &Field,
                       k4: &Field|
         -> Result<Field> {
            let mid = k2.add_scaled(k3, 1.0)?;
            u2.add_scaled(&mul(k1, &e2), 1.0 / 6.0)?
                .add_scaled(&mul(&mid, &e), 2.0 / 6.0)?
                .add_scaled(k4, 1.0 / 6.0)
        };
        let v_next = combine(&e2v, &k1v, &k2v, &k3v, &k4v)?;
        let w_next = combine(&e2w, &k1w, &k2w, &k3w, &k4w)?;
        if !check_finite(&v_next) || !check_finite(&w_next) {
            blowup = Some(BlowUpReport {
                last_finite_time: t,
                last_linf: f64::NAN,
            });
            break;
        }
        let linf_sum = v_next
            .add_scaled(&w_next, 1.0)?
            .to_physical()?
            .linf_norm()?;
        if linf_sum > BLOWUP_LINF {
            blowup = Some(BlowUpReport {
                last_finite_time: t,
                last_linf: linf_sum,
            });
            break;
        }
        v = v_next;
        w = w_next;
        // trapezoid increment with F at both endpoints of the step
        let f_next = {
            let (_, nw) = rhs(&v, &w)?;
            nw.scaled(-1.0)
        };
        z = mul(&z, &e2).add_scaled(
            &mul(&f_n, &e2).add_scaled(&f_next, 1.0)?,
            sign * 0.5 * dt,
        )?;
        f_n = f_next;
        t += dt;
        if (step_idx + 1) % cfg.snapshot_stride == 0 || step_idx + 1 == n_steps {
            trajectory.push(SplitPair {
                n_cutoff: pair.n_cutoff,
                v: v.clone(),
                w: w.clone(),
                z: z.clone(),
                t,
            });
        }
    }
    let final_pair = SplitPair {
        n_cutoff: pair.n_cutoff,
        v,
        w,
        z,
        t,
    };
    Ok(CoupledResult {
        trajectory,
        final_pair,
        blowup,
    })
}
