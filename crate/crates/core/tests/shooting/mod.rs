//! Independent oracle for the k = 2, c = 1 ground-state mass: shoot the
//! radial ODE  phi'' + phi'/r - phi + phi^3/3 = 0  from r = 0 and bisect on
//! phi(0) for the decaying separatrix, then quadrature the mass. This never
//! touches the spectral solver, so agreement is a genuine cross-check.

/// Radial system y = (phi, phi'), regularized at r = 0 (there the friction
/// term contributes half: phi'' = (phi - phi^3/3) / 2).
fn rhs(r: f64, y: [f64; 2]) -> [f64; 2] {
    let nonlin = y[0] - y[0] * y[0] * y[0] / 3.0;
    let dd = if r == 0.0 {
        nonlin / 2.0
    } else {
        nonlin - y[1] / r
    };
    [y[1], dd]
}

fn rk4_step(r: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = rhs(r, y);
    let k2 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrate from phi(0) = a. Off the separatrix a shot either crosses zero
/// (a too large) or turns back up and spirals into the stable rest state
/// sqrt(3) (a too small). Returns (+1 too small, -1 too large, 0 ambiguous)
/// and the trajectory.
fn shoot(a: f64, h: f64, r_max: f64) -> (i32, Vec<(f64, f64)>) {
    let mut y = [a, 0.0];
    let mut r = 0.0;
    let mut traj = vec![(0.0, a)];
    while r < r_max {
        y = rk4_step(r, y, h);
        r += h;
        traj.push((r, y[0]));
        if y[0] < 0.0 {
            return (-1, traj);
        }
        if y[1] > 0.0 {
            return (1, traj);
        }
    }
    (0, traj)
}

/// Mass ||phi||_{L^2(R^2)} of the separatrix profile via bisection + trapezoid
/// quadrature of 2 pi  int phi^2 r dr, truncated where the shot departs.
pub fn townes_scaled_mass() -> f64 {
    let h = 1e-3;
    let r_max = 25.0;
    let (mut lo, mut hi) = (3.0f64, 5.0f64);
    assert_eq!(shoot(lo, h, r_max).0, 1, "bracket: low end must turn back up");
    assert_eq!(shoot(hi, h, r_max).0, -1, "bracket: high end must cross zero");
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match shoot(mid, h, r_max).0 {
            1 => lo = mid,
            _ => hi = mid,
        }
    }
    let a = 0.5 * (lo + hi);
    let (_, traj) = shoot(a, h, r_max);
    // Quadrature while the profile is still on the decaying separatrix; the
    // tail is ~ e^{-r}, so phi^2 r is ~ 1e-16 by the 1e-9 floor and the
    // truncation error is far below the 0.1% comparison tolerance.
    let mut mass2 = 0.0;
    let mut prev = traj[0];
    for &(r, phi) in &traj[1..] {
        if !(0.0..=prev.1).contains(&phi) {
            break;
        }
        mass2 += 0.5 * (prev.1 * prev.1 * prev.0 + phi * phi * r) * h;
        prev = (r, phi);
        if phi < 1e-9 {
            break;
        }
    }
    (2.0 * std::f64::consts::PI * mass2).sqrt()
}
