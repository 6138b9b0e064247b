"""Newtonian and Helmholtz potentials of uniformly charged domains.

Direct values come from volume (or surface) quadrature of the kernel and
are restricted to exterior points with a separation margin of
``0.1 * diam``; closer points are refused rather than computed badly.
Far-field values come from the harmonic moments ``c_lm`` of the domain and
the addition theorem ``1/|x-y| = sum 4 pi/(2l+1) |y|^l/|x|^(l+1) conj(Y_lm(y0)) Y_lm(x0)``::

    u(x) = sum_lm c_lm Y_lm(x/|x|) / ((2l+1) |x|^(l+1)),    |x| > sup |y|
"""
import csv
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import _accel, specfun
from .errors import ConvergenceRegionError, DomainError, NearSingularityError
from .geometry import diameter_bound, distance_to_domain, enclosing_radius, volume_quadrature

SEPARATION = 0.1
MAX_MULTIPOLE_DEGREE = 20
SWEEP_COLUMNS = ("x", "y", "z", "re", "im", "method", "order")


@lru_cache(maxsize=64)
def cached_rule(d, order):
    return volume_quadrature(d, order)


def _targets(x):
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != 3:
        raise ValueError(f"evaluation points must be 3-vectors, got shape {np.shape(x)}")
    return pts, single


def _check_margin(d, pts):
    dist = distance_to_domain(d, pts)
    margin = SEPARATION * diameter_bound(d)
    bad = dist < margin
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise NearSingularityError(
            f"point {pts[i].tolist()} is {dist[i]:.3g} from the domain, inside the "
            f"{margin:.3g} separation margin; use a closed form for interior or "
            "near-boundary values"
        )


def _wavenumber(k):
    k = float(k)
    if not (k > 0 and math.isfinite(k)):
        raise DomainError(f"wavenumber must be positive and finite, got {k}")
    return k


def newtonian_direct(d, x, order, backend=None):
    """``int_D dy / (4 pi |x - y|)`` by volume quadrature.

    *x* may be a single point or an ``(n, 3)`` array.
    """
    pts, single = _targets(x)
    _check_margin(d, pts)
    rule = cached_rule(d, order)
    out = _accel.newtonian_sum(pts, rule.nodes, rule.weights, backend=backend)
    return float(out[0]) if single else out


def helmholtz_volume_direct(d, k, x, order, backend=None):
    """``int_D exp(ik|x-y|) / (4 pi |x-y|) dy`` by volume quadrature."""
    k = _wavenumber(k)
    pts, single = _targets(x)
    _check_margin(d, pts)
    rule = cached_rule(d, order)
    out = _accel.helmholtz_sum(pts, rule.nodes, rule.weights, k, backend=backend)
    return complex(out[0]) if single else out


# --------------------------------------------------------------------------
# multipole expansion


@dataclass(frozen=True, eq=False)
class MultipoleCoefficients:
    """Harmonic moments ``c_lm = int_D |y|^l conj(Y_lm(y/|y|)) dy``.

    ``coeffs[l, m + max_degree]``; slots with ``|m| > l`` are zero.
    """

    max_degree: int
    coeffs: np.ndarray

    def __getitem__(self, lm):
        ell, m = lm
        specfun.SphericalIndex(ell, m)
        if ell > self.max_degree:
            raise IndexError(f"degree {ell} above max_degree {self.max_degree}")
        return complex(self.coeffs[ell, self.max_degree + m])

    def truncated(self, L):
        if L > self.max_degree:
            raise ValueError(f"cannot extend coefficients from {self.max_degree} to {L}")
        M = self.max_degree
        return MultipoleCoefficients(L, self.coeffs[: L + 1, M - L : M + L + 1].copy())


def multipole_coefficients_from_rule(rule, L):
    if not (0 <= L <= MAX_MULTIPOLE_DEGREE):
        raise ValueError(f"multipole degree must be in 0..{MAX_MULTIPOLE_DEGREE}, got {L}")
    table = specfun.solid_harmonic_table(L, rule.nodes)
    return MultipoleCoefficients(L, np.conj(table) @ rule.weights)


def multipole_coefficients(d, L, order):
    return multipole_coefficients_from_rule(cached_rule(d, order), L)


def newtonian_multipole_eval(mc, x, r_src):
    """Truncated far-field series for the Newtonian potential.

    Valid only for ``|x| > r_src`` where ``r_src >= sup_{y in D} |y|``; the
    truncation error behaves like ``(r_src/|x|)^(L+1)``.
    """
    pts, single = _targets(x)
    r = np.linalg.norm(pts, axis=1)
    if np.any(r <= r_src):
        raise ConvergenceRegionError(
            f"|x| = {float(r.min()):.6g} is not outside the source radius {r_src:.6g}"
        )
    L = mc.max_degree
    ytab = specfun.sph_harm_table(L, pts)
    total = np.zeros(len(pts), dtype=complex)
    for ell in range(L + 1):
        total += np.einsum("m,mn->n", mc.coeffs[ell], ytab[ell]) / ((2 * ell + 1) * r**ell)
    out = (total / r).real
    return float(out[0]) if single else out


# --------------------------------------------------------------------------
# closed forms for balls and spheres


def ball_form_factor(a, k):
    """``int_0^a r^2 j_0(kr) dr = (sin(ka) - ka cos(ka)) / k^3``.

    Uses the series of ``a^3 j_1(ka)/(ka)`` for small ``ka`` to avoid the
    cancellation in the closed form.
    """
    a = float(a)
    k = float(k)
    x = k * a
    if x < 0.5:
        term = 1.0 / 3.0
        total = term
        for n in range(1, 30):
            term *= -x * x / ((2 * n + 2) * (2 * n + 3)) * (2 * n + 2) / (2 * n)
            total += term
            if abs(term) < 1e-17 * abs(total):
                break
        return a**3 * total
    return (math.sin(x) - x * math.cos(x)) / k**3


def _exterior_radius(x, center, a):
    pts, single = _targets(x)
    r = np.linalg.norm(pts - np.asarray(center, dtype=float), axis=1)
    if np.any(r <= a):
        raise DomainError(f"closed form needs |x| > {a}, got {float(r.min())}")
    return r, single


def helmholtz_ball_closed_form(a, k, x, center=(0.0, 0.0, 0.0)):
    """Exterior Helmholtz volume potential of a ball: ``F(a,k) exp(ik|x|) / |x|``."""
    k = _wavenumber(k)
    if not a > 0:
        raise DomainError(f"ball radius must be positive, got {a}")
    r, single = _exterior_radius(x, center, a)
    out = ball_form_factor(a, k) * np.exp(1j * k * r) / r
    return complex(out[0]) if single else out


def newtonian_ball_closed_form(a, x, center=(0.0, 0.0, 0.0)):
    """Potential of a uniform ball at any point (interior included)."""
    pts, single = _targets(x)
    r = np.linalg.norm(pts - np.asarray(center, dtype=float), axis=1)
    inside = r < a
    out = np.empty(len(r))
    out[~inside] = a**3 / (3.0 * r[~inside])
    out[inside] = (3.0 * a * a - r[inside] ** 2) / 6.0
    return float(out[0]) if single else out


def sphere_surface_closed_form(a, k, x, center=(0.0, 0.0, 0.0)):
    """Exterior single-layer potential of a sphere: ``a sin(ka) exp(ik|x|) / (k|x|)``."""
    k = _wavenumber(k)
    if not a > 0:
        raise DomainError(f"sphere radius must be positive, got {a}")
    r, single = _exterior_radius(x, center, a)
    out = a * math.sin(k * a) / k * np.exp(1j * k * r) / r
    return complex(out[0]) if single else out


def helmholtz_surface_direct(mesh, k, x, backend=None):
    """Single-layer value ``int_S exp(ik|x-t|) / (4 pi |x-t|) dt`` by mesh quadrature."""
    k = _wavenumber(k)
    pts, single = _targets(x)
    v = mesh.vertices
    diam = 2.0 * float(np.max(np.linalg.norm(v - v.mean(axis=0), axis=1)))
    for p in pts:
        dist = float(np.min(np.linalg.norm(v - p, axis=1)))
        if dist < SEPARATION * diam:
            raise NearSingularityError(
                f"point {p.tolist()} is {dist:.3g} from the surface, inside the "
                f"{SEPARATION * diam:.3g} separation margin"
            )
    out = _accel.helmholtz_sum(pts, v, mesh.node_areas, k, backend=backend)
    return complex(out[0]) if single else out


def source_radius(d):
    return enclosing_radius(d)


def write_sweep_csv(rows, fh):
    """Write potential sweep rows (dicts keyed by :data:`SWEEP_COLUMNS`)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v
