#!/usr/bin/env python3
"""Smoke test for the gzk_py extension module.

Builds nothing itself: expects `cargo build -p gzk-py` to have produced
target/debug/libgzk_py.so, which it copies next to itself under the
importable name gzk_py.so.
"""

import math
import shutil
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
SO = HERE.parent / "target" / "debug" / "libgzk_py.so"

if not SO.exists():
    sys.exit(f"missing {SO}; run `cargo build -p gzk-py` first")
shutil.copyfile(SO, HERE / "gzk_py.so")
sys.path.insert(0, str(HERE))

import gzk_py as gz  # noqa: E402

checks = 0


def expect(cond, msg):
    global checks
    checks += 1
    if not cond:
        sys.exit(f"FAIL: {msg}")
    print(f"  ok: {msg}")


# grid round-trip
g = gz.Grid(128, 128, 2 * math.pi, 2 * math.pi)
expect(g.nx == 128 and abs(g.lx - 2 * math.pi) < 1e-15, "grid constructor and getters")

# field round-trip and norms: u = sin(x) has L2 norm sqrt(Lx*Ly/2)
vals = [
    math.sin(2 * math.pi * i / 128)
    for i in range(128)
    for _ in range(128)
]
u = gz.Field.from_values(g, vals)
expect(abs(u.l2_norm() - math.sqrt(2) * math.pi) < 1e-12, "L2 norm of sin(x)")
expect(abs(u.sobolev_norm(1.0, True) - u.l2_norm()) < 1e-12, "H1-dot norm of sin(x)")
back = u.values()
expect(max(abs(a - b) for a, b in zip(back, vals)) < 1e-14, "physical values round-trip")

# linear group is unitary and invertible
ut = gz.apply_group(u, 0.37)
expect(abs(ut.l2_norm() - u.l2_norm()) < 1e-12, "apply_group unitary")
u00 = gz.apply_group(ut, -0.37).values()
expect(max(abs(a - b) for a, b in zip(u00, vals)) < 1e-10, "apply_group invertible")

# ground state on a soliton-sized box
gs_grid = gz.Grid(256, 256, 12 * math.pi, 12 * math.pi)
profile, mass, residual = gz.ground_state(2, 1.0, gs_grid)
expect(residual < 1e-8, f"ground-state residual {residual:.2e}")
expect(abs(math.sqrt(mass) - 5.9247) < 2e-3, f"critical mass vs sqrt(3)*Townes: {math.sqrt(mass):.5f}")
expect(abs(gz.critical_mass(gs_grid) - math.sqrt(mass)) < 1e-10, "critical_mass consistent")

# short nonlinear run conserves mass
v = gz.evolve(u, 2, 0.05, 1e-3)
expect(abs(v.l2_norm() - u.l2_norm()) < 1e-8, "evolve conserves L2")

print(f"smoke test passed ({checks} checks)")
