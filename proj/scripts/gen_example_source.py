#!/usr/bin/env python3
"""Generate the closed-form forcing term of the smooth Navier-Stokes test case.

Writes src/example_source.inc (C++ expressions) and prints reference values
at fixed points; tests/support/reference_data.hpp freezes them.

    python3 scripts/gen_example_source.py > /dev/null
"""
import pathlib
import random

import sympy as sp

x, y, nu = sp.symbols("x y nu")

u1 = -x**2 * (x - 1) ** 2 * y * (y - 1) * (2 * y - 1)
u2 = x * (x - 1) * (2 * x - 1) * y**2 * (y - 1) ** 2
p = 10 * ((x - sp.Rational(1, 2)) ** 3 * y**2 + (1 - x) ** 3 * (y - sp.Rational(1, 2)) ** 3)

u = sp.Matrix([u1, u2])
grad = sp.Matrix([[sp.diff(u[i], v) for v in (x, y)] for i in range(2)])
lap = sp.Matrix([sp.diff(u[i], x, 2) + sp.diff(u[i], y, 2) for i in range(2)])
# div(u (x) u)_i = sum_j d_j (u_i u_j)
conv = sp.Matrix([sum(sp.diff(u[i] * u[j], v) for j, v in enumerate((x, y))) for i in range(2)])
gradp = sp.Matrix([sp.diff(p, x), sp.diff(p, y)])
f = -nu * lap + conv + gradp

assert sp.simplify(sp.diff(u1, x) + sp.diff(u2, y)) == 0
assert sp.integrate(sp.integrate(p, (x, 0, 1)), (y, 0, 1)) == 0


def cxx(expr):
    return sp.ccode(sp.horner(sp.expand(expr), wrt=x)).replace("pow", "std::pow")


out = ["// Generated by scripts/gen_example_source.py. Do not edit.", ""]
names = {
    "u1": u1, "u2": u2, "p": p,
    "du1dx": grad[0, 0], "du1dy": grad[0, 1], "du2dx": grad[1, 0], "du2dy": grad[1, 1],
    "lap1": lap[0], "lap2": lap[1], "conv1": conv[0], "conv2": conv[1],
    "dpdx": gradp[0], "dpdy": gradp[1],
}
for name, expr in names.items():
    out.append(f"inline double smooth_{name}(double x, double y) {{ return {cxx(expr)}; }}")
out.append("")
path = pathlib.Path(__file__).resolve().parent.parent / "src" / "example_source.inc"
path.write_text("\n".join(out))

rng = random.Random(20240917)
for _ in range(20):
    px, py = rng.random(), rng.random()
    fx = sp.N(f[0].subs({x: px, y: py, nu: 1}), 20)
    fy = sp.N(f[1].subs({x: px, y: py, nu: 1}), 20)
    print(f"{{{px!r}, {py!r}, {float(fx)!r}, {float(fy)!r}}},")
fx = sp.N(f[0].subs({x: sp.Rational(1, 2), y: sp.Rational(1, 2), nu: 1}), 20)
fy = sp.N(f[1].subs({x: sp.Rational(1, 2), y: sp.Rational(1, 2), nu: 1}), 20)
print("center", f[0].subs({x: sp.Rational(1, 2), y: sp.Rational(1, 2), nu: 1}),
      f[1].subs({x: sp.Rational(1, 2), y: sp.Rational(1, 2), nu: 1}), float(fx), float(fy))
