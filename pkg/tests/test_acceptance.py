"""Acceptance suite: nine end-to-end criteria, each with a runtime budget.

Every criterion prints one ``PASS``/``FAIL`` line (also collected into the
pytest terminal summary). Run on its own with::

    pytest tests/test_acceptance.py -v
    python3 -m tests.test_acceptance
"""
from functools import lru_cache
import math
import time

import numpy as np
import pytest
from scipy import integrate

from potlab import geometry, moments, potentials, specfun, transparency
from potlab.geometry import Ball, StarShaped

from .conftest import STAR_COEFFS
from .oracles import tan_root

RESULTS = []


def _star():
    return StarShaped((0.0, 0.0, 0.0), STAR_COEFFS)


def shell_theorem():
    ball = Ball((0.0, 0.0, 0.0), 1.0)
    x = [0.0, 0.0, 2.0]
    direct = abs(potentials.newtonian_direct(ball, x, 12) - 1 / 6)
    mc = potentials.multipole_coefficients(ball, 0, 12)
    multi = abs(potentials.newtonian_multipole_eval(mc, x, 1.0) - 1 / 6)
    ok = direct <= 1e-10 and multi <= 1e-14
    return ok, f"direct err {direct:.2e} (<=1e-10), multipole L=0 err {multi:.2e} (<=1e-14)"


def multipole_realization():
    d = _star()
    R = geometry.enclosing_radius(d)
    dirs = geometry.fibonacci_sphere(16)
    pts = 3 * R * dirs
    direct = potentials.newtonian_direct(d, pts, 16)
    mc16 = potentials.multipole_coefficients(d, 16, 16)
    rel = np.max(np.abs(potentials.newtonian_multipole_eval(mc16, pts, R) - direct) / np.abs(direct))
    mc8 = mc16.truncated(8)
    errs = []
    for f in (3.0, 6.0):
        p = f * R * dirs
        errs.append(np.max(np.abs(potentials.newtonian_multipole_eval(mc8, p, R) - potentials.newtonian_direct(d, p, 16))))
    ratio = errs[0] / errs[1]
    ok = rel <= 1e-8 and ratio >= 2**8
    return ok, f"L=16 rel err {rel:.2e} (<=1e-8), L=8 error ratio {ratio:.0f} (>=256)"


@lru_cache(maxsize=1)
def formula_gate():
    worst = 0.0
    for a, k in [(1.0, 1.0), (math.pi, 1.0), (2.0, 3.0)]:
        ref = integrate.quad(lambda r: r * r * (math.sin(k * r) / (k * r) if r else 1.0), 0.0, a, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        worst = max(worst, abs(transparency.radial_integral(a, k) - ref))
    return worst <= 1e-12, f"max |closed form - quad| {worst:.2e} (<=1e-12)"


def _gate_open():
    ok, _ = formula_gate()
    return ok


def volume_transparency():
    if not _gate_open():
        return False, "formula gate failed"
    roots = transparency.transparency_roots(3)
    certified = all(
        transparency.transcendental(r.bracket[0]) * transparency.transcendental(r.bracket[1]) < 0
        and abs(transparency.transcendental(r.x)) <= 1e-12
        and abs(r.x - tan_root(r.n)) <= 1e-12
        for r in roots
    )
    a = roots[0].x
    radii = np.linspace(6.0, 20.0, 20)
    pts = radii[:, None] * geometry.fibonacci_sphere(20)
    u_root = transparency.verify_transparency(a, 1.0, pts, 24)
    u_off = transparency.verify_transparency(1.0, 1.0, [[0.0, 0.0, 6.0]], 16)
    ok = certified and u_root <= 1e-8 and u_off >= 0.05
    return ok, f"roots certified {certified}, |U| at a=x1 {u_root:.2e} (<=1e-8), |U| at a=1 {u_off:.4f} (>=0.05)"


def surface_transparency():
    if not _gate_open():
        return False, "formula gate failed"
    k = 1.0
    a = math.pi / k
    pts = np.concatenate([r * geometry.fibonacci_sphere(10) for r in (2 * a, 4 * a)])
    sphere = Ball((0.0, 0.0, 0.0), a)
    coarse = np.max(np.abs(potentials.helmholtz_surface_direct(geometry.surface_mesh(sphere, 64), k, pts)))
    fine = np.max(np.abs(potentials.helmholtz_surface_direct(geometry.surface_mesh(sphere, 256), k, pts)))
    off = Ball((0.0, 0.0, 0.0), 1.0)
    off_pts = np.concatenate([r * geometry.fibonacci_sphere(10) for r in (2.0, 5.0)])
    mesh_vals = potentials.helmholtz_surface_direct(geometry.surface_mesh(off, 64), k, off_pts)
    closed = potentials.sphere_surface_closed_form(1.0, k, off_pts)
    off_err = np.max(np.abs(mesh_vals - closed))
    ok = coarse <= 1e-4 and fine <= 1e-6 and off_err <= 1e-4
    return ok, f"|V| res64 {coarse:.2e} (<=1e-4), res256 {fine:.2e} (<=1e-6), closed form vs mesh at ka=1 {off_err:.2e}"


def moment_discrimination():
    d1, d2 = Ball((0.0, 0.0, 0.0), 1.0), Ball((0.0, 0.0, 0.5), 1.0)
    v = moments.moment_gap(d1, d2, 8, 12)
    expected = math.sqrt(3 / (4 * math.pi)) * (4 * math.pi / 3) * 0.5
    c10 = abs(potentials.multipole_coefficients(d1, 1, 12)[1, 0] - potentials.multipole_coefficients(d2, 1, 12)[1, 0])
    gap = moments.exterior_potential_gap(d1, d2, 5.0 * geometry.fibonacci_sphere(64), 12)
    same = [moments.moment_gap(d, d, 8, 12, tol=1e-10).matched for d in (d1, _star())]
    ok = v.first_mismatch == (1, 0) and abs(c10 - expected) <= 1e-6 and gap >= 1e-3 and all(same)
    return ok, f"first mismatch {v.first_mismatch}, |dc10 - expected| {abs(c10 - expected):.2e}, gap at |x|=5 {gap:.2e}, self-match {same}"


def rotation_and_sphere():
    rng = np.random.default_rng(0)
    ratios = []
    for axis in np.eye(3):
        for x in rng.normal(size=(5, 3)):
            r1 = geometry.rotation_derivative_residual(axis, x, 1e-3)
            r2 = geometry.rotation_derivative_residual(axis, x, 1e-4)
            if r2 > 0:
                ratios.append(r1 / r2)
    spheres = max(geometry.sphere_residual(geometry.surface_mesh(Ball((0, 0, 0), r), 32)) for r in (0.5, 1.0, 3.0))
    ellipsoid = geometry.sphere_residual(geometry.ellipsoid_mesh((1.0, 1.0, 2.0), 32))
    shifted = geometry.sphere_residual(geometry.surface_mesh(Ball((0.5, 0.0, 0.0), 1.0), 32))
    ok = all(90 <= q <= 110 for q in ratios) and spheres <= 1e-10 and ellipsoid >= 0.1 and shifted >= 0.1
    return ok, (
        f"ratio range [{min(ratios):.2f}, {max(ratios):.2f}] (100+-10), sphere {spheres:.1e} (<=1e-10), "
        f"ellipsoid {ellipsoid:.3f}, translated {shifted:.3f} (>=0.1)"
    )


def divergence_identity():
    worst = 0.0
    for d in (Ball((0.0, 0.0, 0.0), 1.0), _star()):
        for name in list(moments.CATALOG)[:8]:
            h = moments.catalog_harmonic(name)
            for alpha in np.eye(3):
                worst = max(worst, moments.divergence_identity_residual(d, h, alpha, 12, 64))
    return worst <= 1e-6, f"max residual {worst:.2e} over 48 cases (<=1e-6)"


def special_functions():
    L = 8
    dirs, w = geometry.sphere_product_rule(2 * L + 2, 4 * L + 4)
    y = specfun.sph_harm_table(L, dirs).reshape(-1, len(dirs))
    mask = np.array([abs(m) <= l for l in range(L + 1) for m in range(-L, L + 1)])
    y = y[mask]
    ortho = np.max(np.abs((y * w) @ y.conj().T - np.eye(len(y))))
    rec = 0.0
    for x in np.linspace(0.1, 50.0, 200):
        j = specfun.spherical_bessel_j_table(21, x)
        ells = np.arange(1, 21)
        rec = max(rec, np.max(np.abs((2 * ells + 1) * j[1:21] / x - j[:20] - j[2:22])))
    wr = 0.0
    for x in np.linspace(0.5, 50.0, 100):
        for ell in range(0, 21):
            val = specfun.spherical_bessel_j(ell, x) * specfun.spherical_bessel_y_derivative(ell, x)
            val -= specfun.spherical_bessel_j_derivative(ell, x) * specfun.spherical_bessel_y(ell, x)
            wr = max(wr, abs(val * x * x - 1.0))
    ok = ortho <= 1e-10 and rec <= 1e-10 and wr <= 1e-10
    return ok, f"orthonormality {ortho:.1e}, recurrence {rec:.1e}, Wronskian rel {wr:.1e} (all <=1e-10)"


CRITERIA = [
    (1, "shell theorem", shell_theorem, 1.0),
    (2, "multipole vs direct", multipole_realization, 10.0),
    (3, "volume transparency", volume_transparency, 30.0),
    (4, "radial integral gate", formula_gate, 1.0),
    (5, "surface transparency", surface_transparency, 30.0),
    (6, "moment discrimination", moment_discrimination, 10.0),
    (7, "rotation and sphere checks", rotation_and_sphere, 5.0),
    (8, "divergence identity", divergence_identity, 60.0),
    (9, "special functions", special_functions, 5.0),
]


def run_criterion(number, label, check, budget):
    t0 = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - t0
    within = elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    line = f"[{status}] criterion {number} {label}: {detail}; {elapsed:.2f}s (<{budget:g}s)"
    print(line)
    RESULTS.append(line)
    return ok, within, line


@pytest.mark.parametrize("number, label, check, budget", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(number, label, check, budget):
    ok, within, line = run_criterion(number, label, check, budget)
    assert ok, line
    assert within, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    raise SystemExit(0 if all(ok and within for ok, within, _ in results) else 1)
