//! End-to-end acceptance checks, one per advertised property. Each prints a
//! single PASS/FAIL line (run with `--nocapture` to see them as they land);
//! the test fails if any criterion fails.

use std::f64::consts::PI;

use gzk::ensembles::{band_limited_field, hs_datum};
use gzk::evolution::{
    coupled_evolve, energy_bootstrap_report, evolve, DtPolicy, DuhamelConvention, Integrator,
    SimulationConfig, SplitPair,
};
use gzk::experiments::{
    critical_mass_experiment, highlow_experiment, illposed_experiment, scaling_experiment,
    family_norm_report, DatumShape, Verdict,
};
use gzk::grid::{make_grid, GridSpec};
use gzk::ground_state::{
    critical_mass, pohozaev_check, solve_ground_state, GroundState, SolveOptions,
};
use gzk::probes::{estimate_probe, ProbeKind};
use gzk::propagator::{apply_group, translate};
use gzk::spectral::{low_high_split, sobolev_norm, CutoffSet};

mod shooting;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn check(&mut self, idx: u32, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("criterion {idx:02} [{tag}] {name}: {detail}");
        if !ok {
            self.failures.push(format!("{idx:02} {name}: {detail}"));
        }
    }
}

fn sim(k: u32, grid: &GridSpec, t_end: f64, dt: f64) -> SimulationConfig {
    SimulationConfig {
        k,
        grid: grid.clone(),
        t_end,
        dt_policy: DtPolicy::Fixed(dt),
        integrator: Integrator::IfRk4,
        dealias: true,
        snapshot_stride: usize::MAX - 1,
        diagnostic_stride: 10,
    }
}

fn grid2pi(n: usize) -> GridSpec {
    make_grid(n, n, 2.0 * PI, 2.0 * PI).unwrap()
}

// 1. linear group: unitarity and the composition law
fn criterion_unitarity(gate: &mut Gate) {
    let g = grid2pi(128);
    let (mut worst_u, mut worst_c) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let f = band_limited_field(&g, 1000 + seed, 20).unwrap();
        let t = 0.31 + 0.01 * seed as f64;
        let s = -0.17;
        let ut = apply_group(&f, t).unwrap();
        worst_u = worst_u.max((ut.l2_norm() / f.l2_norm() - 1.0).abs());
        let comp = apply_group(&apply_group(&f, s).unwrap(), t).unwrap();
        let direct = apply_group(&f, t + s).unwrap();
        worst_c = worst_c.max(comp.rel_l2_distance(&direct).unwrap());
    }
    gate.check(
        1,
        "linear group unitarity and composition",
        worst_u <= 1e-12 && worst_c <= 1e-12,
        format!("unitarity err {worst_u:.2e}, composition err {worst_c:.2e} (tol 1e-12)"),
    );
}

// 2. conserved quantities on a smooth k = 2 run
fn criterion_conservation(gate: &mut Gate) {
    let g = grid2pi(256);
    let u0 = band_limited_field(&g, 7, 8).unwrap();
    let out = evolve(&u0, &sim(2, &g, 1.0, 1e-3)).unwrap();
    let (d1, d2) = (out.diagnostics.i1_drift(), out.diagnostics.i2_drift());
    gate.check(
        2,
        "mass and energy drift",
        out.blowup.is_none() && d1 <= 1e-8 && d2 <= 1e-6,
        format!("I1 drift {d1:.2e} (tol 1e-8), I2 drift {d2:.2e} (tol 1e-6)"),
    );
}

// 3. the k = 2 solitary wave translates rigidly
fn criterion_traveling_wave(gate: &mut Gate, phi1: &GroundState) {
    let g = phi1.profile.grid().clone();
    let t_end = g.lx() / 4.0;
    let steps = 4000usize;
    let out = evolve(&phi1.profile, &sim(2, &g, t_end, t_end / steps as f64)).unwrap();
    let expect = translate(&phi1.profile, t_end, 0.0).unwrap().physical().unwrap();
    let err = out.final_state.rel_l2_distance(&expect).unwrap();
    gate.check(
        3,
        "rigid soliton translation",
        out.blowup.is_none() && err <= 1e-3,
        format!("shape error {err:.2e} after T = Lx/4 = {t_end:.3} (tol 1e-3)"),
    );
}

// 4. ground-state quality: residual, Pohozaev, independent mass oracle,
//    refinement stability of the critical mass
fn criterion_ground_state(gate: &mut Gate, phi1: &GroundState) {
    let rep = pohozaev_check(phi1).unwrap();
    let poho = rep
        .mass_identity_err
        .max(rep.gradient_identity_err)
        .max(rep.gn_equality_err);

    let oracle_mass = shooting::townes_scaled_mass();
    let mass_err = (phi1.mass.sqrt() / oracle_mass - 1.0).abs();

    let fine = make_grid(448, 448, 12.0 * PI, 12.0 * PI).unwrap();
    let refined = critical_mass(&fine, &SolveOptions::default()).unwrap();
    let refine_err = (refined / phi1.mass.sqrt() - 1.0).abs();

    gate.check(
        4,
        "ground state: residual, identities, mass oracle, refinement",
        phi1.residual <= 1e-10 && poho <= 1e-6 && mass_err <= 1e-3 && refine_err <= 1e-3,
        format!(
            "residual {:.2e}, identity err {poho:.2e}, shooting-oracle mass err {mass_err:.2e}, \
             refinement err {refine_err:.2e}",
            phi1.residual
        ),
    );
}

// 5. soliton family: critical-norm invariance and norm scaling slopes
fn criterion_family(gate: &mut Gate) {
    let mut ok = true;
    let mut detail = String::new();
    for k in [2u32, 3] {
        let mut profiles = Vec::new();
        for c in [0.5f64, 1.0, 2.0, 4.0] {
            // per-speed box: half-width ~ 20 / sqrt(c) decay lengths
            let lx = (40.0 / c.sqrt() / PI).ceil() * PI;
            let g = make_grid(256, 256, lx, lx).unwrap();
            profiles.push(solve_ground_state(k, c, &g, &SolveOptions::default()).unwrap());
        }
        let rep = family_norm_report(k, &profiles, &[0.0, 0.5, 1.0]).unwrap();
        ok &= rep.critical_variation <= 0.01 && rep.slope_err_max <= 0.02;
        detail.push_str(&format!(
            "k={k}: critical-norm variation {:.2e} (tol 1e-2), slope err {:.2e} (tol 2e-2); ",
            rep.critical_variation, rep.slope_err_max
        ));
    }
    gate.check(5, "soliton family norms", ok, detail);
}

// 6. scaling symmetry, static and dynamic
fn criterion_scaling(gate: &mut Gate) {
    let g = grid2pi(128);
    let u0 = band_limited_field(&g, 43, 8).unwrap();
    let rep = scaling_experiment(2, 2.0, &u0, 0.05, 1e-3).unwrap();
    gate.check(
        6,
        "scaling symmetry",
        rep.verdict == Verdict::Pass && rep.static_err_max <= 1e-10 && rep.dynamic_err <= 1e-4,
        format!(
            "static err {:.2e} (tol 1e-10), dynamic err {:.2e} (tol 1e-4)",
            rep.static_err_max, rep.dynamic_err
        ),
    );
}

// 7. flow-map separation surrogate at the critical regularity, k = 3
fn criterion_illposed(gate: &mut Gate) {
    let grid = make_grid(512, 512, 6.0 * PI, 6.0 * PI).unwrap();
    let base = make_grid(384, 384, 16.0 * PI, 16.0 * PI).unwrap();
    let rep =
        illposed_experiment(3, &[4, 8, 16], 1.0, &grid, &base, &SolveOptions::default()).unwrap();
    let decreasing = rep.rows.windows(2).all(|w| w[1].delta0 < w[0].delta0);
    gate.check(
        7,
        "flow-map separation",
        rep.verdict == Verdict::Pass,
        format!(
            "delta0 decreasing: {decreasing}, terminal separation / (sqrt(2) a0) = {:.4} \
             (tol [0.95, 1.05])",
            rep.terminal_ratio
        ),
    );
}

// 8. critical-mass dichotomy at k = 2
fn criterion_critical_mass(gate: &mut Gate) {
    let g = make_grid(256, 256, 8.0 * PI, 8.0 * PI).unwrap();
    let below =
        critical_mass_experiment(0.9, DatumShape::GroundStateShaped, 5.0, &g, 1e-3, 12.0).unwrap();
    let above =
        critical_mass_experiment(1.5, DatumShape::GroundStateShaped, 5.0, &g, 1e-3, 10.0).unwrap();
    let above_grew = above.max_grad_ratio >= 10.0 || above.blowup_detected;
    gate.check(
        8,
        "critical-mass dichotomy",
        below.verdict == Verdict::Pass && above.i2_initial < 0.0 && above_grew,
        format!(
            "factor 0.9: grad ratio {:.2} ({}); factor 1.5: I2 = {:.3e}, grad ratio {:.1} \
             ({})",
            below.max_grad_ratio, below.label, above.i2_initial, above.max_grad_ratio, above.label
        ),
    );
}

// 9. high/low frequency splitting step rates
fn criterion_highlow(gate: &mut Gate) {
    let g = grid2pi(256);
    let s = 0.9;
    let u0 = hs_datum(&g, 21, s, 1.0).unwrap();
    // Cutoffs start at 8: the N = 4 point is pre-asymptotic for the z rate
    // on this datum and drags the regression. 1500 steps because the Duhamel
    // accumulator in the coupled system is a trapezoid rule, so the
    // reconstruction residual is O(dt^2) and the longest run (N = 8,
    // T ~ 0.037) needs dt ~ 2.5e-5 to sit under 1e-5.
    let rep = highlow_experiment(&u0, s, &[8.0, 16.0, 32.0, 64.0], 0.1, 1500).unwrap();
    gate.check(
        9,
        "high/low splitting rates",
        rep.verdict == Verdict::Pass,
        format!(
            "w0 slope {:.3} (want {:.1} +- 0.1), v0 slope {:.3} (want {:.1} +- 0.1), z slope \
             {:.3} (cap {:.3}), recon {:.2e} (tol 1e-5), mass bound {}",
            rep.w0_slope,
            -s,
            rep.v0_slope,
            1.0 - s,
            rep.z_slope,
            (3.0 - 5.0 * s) / 2.0 + 0.2,
            rep.recon_max,
            rep.mass_ok
        ),
    );
}

// 10. linear-estimate probes are stable under grid refinement
fn criterion_probes(gate: &mut Gate) {
    let kinds = [
        ProbeKind::Smoothing,
        ProbeKind::Strichartz { theta: 0.5, eps: 0.1 },
        ProbeKind::MaximalL4 { s1: 0.3, r1: 0.55 },
        ProbeKind::MaximalL2 { s: 0.8 },
    ];
    let coarse = grid2pi(128);
    let fine = grid2pi(256);
    let mut ok = true;
    let mut detail = String::new();
    for kind in kinds {
        let a = estimate_probe(kind, &coarse, 0.5, 100, 9000, 20, 12).unwrap();
        let b = estimate_probe(kind, &fine, 0.5, 100, 9000, 20, 12).unwrap();
        let rel = (b.max_ratio / a.max_ratio - 1.0).abs();
        ok &= rel <= 0.2;
        detail.push_str(&format!("{} {:.1}% ", kind.name(), 100.0 * rel));
    }
    gate.check(
        10,
        "probe stability under refinement",
        ok,
        format!("max-ratio shifts: {detail}(tol 20%)"),
    );
}

// 11. split-system consistency: v + w tracks the unsplit solution
fn criterion_split_consistency(gate: &mut Gate) {
    let g = grid2pi(128);
    let u0 = band_limited_field(&g, 23, 12).unwrap();
    let (v0, w0) = low_high_split(&u0, 6.0, CutoffSet::Full).unwrap();
    let pair = SplitPair::new(6.0, &v0, &w0).unwrap();
    let c = sim(2, &g, 0.1, 2.5e-4);
    let out = coupled_evolve(&pair, &c, DuhamelConvention::SignCorrect).unwrap();
    let unsplit = evolve(&u0, &c).unwrap();
    let sum = out.final_pair.sum().unwrap().to_physical().unwrap();
    let err = sum.rel_l2_distance(&unsplit.final_state).unwrap();
    gate.check(
        11,
        "split-system consistency",
        err <= 1e-6,
        format!("|(v+w) - u| relative error {err:.2e} over T = 0.1 (tol 1e-6)"),
    );
}

// 12. small-data global bound and the continuation inequality, k = 3
fn criterion_small_data(gate: &mut Gate) {
    let g = grid2pi(128);
    let raw = hs_datum(&g, 31, 1.0, 1.0).unwrap();
    let h1 = sobolev_norm(&raw, 1.0, false).unwrap();
    let u0 = raw.scaled(0.01 / h1);
    let out = evolve(&u0, &sim(3, &g, 10.0, 5e-3)).unwrap();
    let h1_0 = out.diagnostics.rows.first().unwrap().h1;
    let sup_h1 = out
        .diagnostics
        .rows
        .iter()
        .map(|r| r.h1)
        .fold(0.0f64, f64::max);
    let boot = energy_bootstrap_report(&out.diagnostics, 3).unwrap();
    gate.check(
        12,
        "small-data global bound",
        out.blowup.is_none() && sup_h1 <= 2.0 * h1_0 && boot.min_margin > 0.0,
        format!(
            "sup H1 {:.4e} vs 2 |u0|_H1 = {:.4e}, bootstrap margin min {:.3e} (> 0)",
            sup_h1,
            2.0 * h1_0,
            boot.min_margin
        ),
    );
}

/// With GZK_ACCEPTANCE_ONLY="4,7" only those criteria run (for narrowing a
/// failure without paying for the whole gate); unset runs everything.
fn wanted(idx: u32) -> bool {
    match std::env::var("GZK_ACCEPTANCE_ONLY") {
        Ok(list) => list.split(',').any(|tok| tok.trim() == idx.to_string()),
        Err(_) => true,
    }
}

#[test]
fn acceptance() {
    let mut gate = Gate { failures: Vec::new() };

    if wanted(1) {
        criterion_unitarity(&mut gate);
    }
    if wanted(2) {
        criterion_conservation(&mut gate);
    }

    if wanted(3) || wanted(4) {
        // shared k = 2, c = 1 profile for the soliton criteria
        let g_sol = make_grid(320, 320, 12.0 * PI, 12.0 * PI).unwrap();
        let phi1 = solve_ground_state(2, 1.0, &g_sol, &SolveOptions::default()).unwrap();
        if wanted(3) {
            criterion_traveling_wave(&mut gate, &phi1);
        }
        if wanted(4) {
            criterion_ground_state(&mut gate, &phi1);
        }
    }
    if wanted(5) {
        criterion_family(&mut gate);
    }
    if wanted(6) {
        criterion_scaling(&mut gate);
    }
    if wanted(7) {
        criterion_illposed(&mut gate);
    }
    if wanted(8) {
        criterion_critical_mass(&mut gate);
    }
    if wanted(9) {
        criterion_highlow(&mut gate);
    }
    if wanted(10) {
        criterion_probes(&mut gate);
    }
    if wanted(11) {
        criterion_split_consistency(&mut gate);
    }
    if wanted(12) {
        criterion_small_data(&mut gate);
    }

    assert!(
        gate.failures.is_empty(),
        "failed criteria:\n{}",
        gate.failures.join("\n")
    );
}
