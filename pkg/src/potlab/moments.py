"""Harmonic-moment comparisons between domains.

If two bodies have the same exterior Newtonian potential then
``int_D1 h = int_D2 h`` for every harmonic ``h``. The functions here test
that identity on a finite harmonic family, check the rotated/divergence
form of it on individual domains, and measure exterior potential gaps
directly.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import specfun
from .geometry import QuadratureRule, surface_mesh
from .potentials import cached_rule, multipole_coefficients_from_rule, newtonian_direct

DEFAULT_TOLERANCE = 1e-10


# --------------------------------------------------------------------------
# harmonic test functions


@dataclass(frozen=True)
class HarmonicFunction:
    """A harmonic function with analytic value and gradient."""

    name: str
    value: object
    gradient: object

    def __call__(self, points):
        return self.value(np.atleast_2d(np.asarray(points, dtype=float)))

    def grad(self, points):
        return self.gradient(np.atleast_2d(np.asarray(points, dtype=float)))


def _poly(name, f, g):
    def value(p):
        return np.broadcast_to(np.asarray(f(p[:, 0], p[:, 1], p[:, 2]), dtype=float), p.shape[:1])

    def gradient(p):
        parts = g(p[:, 0], p[:, 1], p[:, 2])
        return np.stack([np.broadcast_to(np.asarray(c, dtype=float), p.shape[:1]) for c in parts], axis=-1)

    return HarmonicFunction(name, value, gradient)



# the first eight are the degree <= 2 family used in the identity checks
CATALOG = {
    h.name: h
    for h in [
        _poly("1", lambda x, y, z: 1.0, lambda x, y, z: (0.0, 0.0, 0.0)),
        _poly("x1", lambda x, y, z: x, lambda x, y, z: (1.0, 0.0, 0.0)),
        _poly("x2", lambda x, y, z: y, lambda x, y, z: (0.0, 1.0, 0.0)),
        _poly("x3", lambda x, y, z: z, lambda x, y, z: (0.0, 0.0, 1.0)),
        _poly("x1*x2", lambda x, y, z: x * y, lambda x, y, z: (y, x, 0.0)),
        _poly("x1*x3", lambda x, y, z: x * z, lambda x, y, z: (z, 0.0, x)),
        _poly("x2*x3", lambda x, y, z: y * z, lambda x, y, z: (0.0, z, y)),
        _poly("x1^2-x2^2", lambda x, y, z: x * x - y * y, lambda x, y, z: (2 * x, -2 * y, 0.0)),
        _poly(
            "2*x3^2-x1^2-x2^2",
            lambda x, y, z: 2 * z * z - x * x - y * y,
            lambda x, y, z: (-2 * x, -2 * y, 4 * z),
        ),
        _poly("x1*x2*x3", lambda x, y, z: x * y * z, lambda x, y, z: (y * z, x * z, x * y)),
        _poly(
            "x1^3-3*x1*x2^2",
            lambda x, y, z: x**3 - 3 * x * y * y,
            lambda x, y, z: (3 * x * x - 3 * y * y, -6 * x * y, 0.0),
        ),
        _poly(
            "x1^4-6*x1^2*x2^2+x2^4",
            lambda x, y, z: x**4 - 6 * x * x * y * y + y**4,
            lambda x, y, z: (4 * x**3 - 12 * x * y * y, 4 * y**3 - 12 * x * x * y, 0.0),
        ),
    ]
}


def catalog_harmonic(name):
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown harmonic {name!r}; choose from {list(CATALOG)}") from None


def solid_harmonic(ell, m, real_part=True):
    """``Re`` (or ``Im``) of ``r^l Y_lm`` as a :class:`HarmonicFunction`."""
    specfun.SphericalIndex(ell, m)
    part = np.real if real_part else np.imag

    def value(p):
        return part(specfun.solid_harmonic_table(ell, p)[ell, ell + m])

    def gradient(p):
        return part(specfun.solid_harmonic_gradient(ell, m, p))

    tag = "re" if real_part else "im"
    return HarmonicFunction(f"{tag} r^{ell} Y[{ell},{m}]", value, gradient)


def laplacian_residual(h, points, step=1e-3):
    """Seven-point finite-difference Laplacian of *h* at each point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    total = -6.0 * h(pts)
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = step
        total = total + h(pts + e) + h(pts - e)
    return total / step**2


# --------------------------------------------------------------------------
# moment comparison


@dataclass(frozen=True)
class MomentVerdict:
    matched: bool
    first_mismatch: object  # (l, m) or None
    max_discrepancy: float
    tolerance_used: float

    def to_dict(self):
        first = None
        if self.first_mismatch is not None:
            first = {"l": int(self.first_mismatch[0]), "m": int(self.first_mismatch[1])}
        return {
            "matched": bool(self.matched),
            "first_mismatch": first,
            "max_discrepancy": float(self.max_discrepancy),
            "tolerance": float(self.tolerance_used),
        }


def _rule(d, order):
    return d if isinstance(d, QuadratureRule) else cached_rule(d, order)


def moment_gap(d1, d2, L, order, tol=DEFAULT_TOLERANCE):
    """Compare the harmonic moments ``c_lm`` of two domains up to degree *L*.

    *d1*/*d2* may be domains or ready-made quadrature rules (e.g. a rotated
    rule). Mismatches are reported in ``(l, m)`` lexicographic order with
    ``m`` ascending from ``-l``.
    """
    c1 = multipole_coefficients_from_rule(_rule(d1, order), L).coeffs
    c2 = multipole_coefficients_from_rule(_rule(d2, order), L).coeffs
    gap = np.abs(c1 - c2)
    first = None
    for ell in range(L + 1):
        for m in range(-ell, ell + 1):
            if gap[ell, L + m] > tol:
                first = (ell, m)
                break
        if first is not None:
            break
    max_gap = float(gap.max())
    return MomentVerdict(first is None, first, max_gap, float(tol))


# --------------------------------------------------------------------------
# rotated / divergence form of the moment identity


def divergence_identity_sides(d, h, alpha, order, mesh_res):
    """Volume side ``int_D grad h . (alpha x y) dy`` and surface side
    ``int_S h N . (alpha x s) ds`` of the divergence identity."""
    alpha = specfun.as_unit_vector(alpha)
    rule = _rule(d, order)
    field = np.cross(alpha, rule.nodes)
    volume = rule.integrate(np.einsum("ij,ij->i", h.grad(rule.nodes), field))
    mesh = surface_mesh(d, mesh_res)
    s = mesh.vertices
    flux = np.einsum("ij,ij->i", mesh.node_normals, np.cross(alpha, s))
    surface = mesh.integrate(h(s) * flux)
    return float(volume), float(surface)


def divergence_identity_residual(d, h, alpha, order, mesh_res):
    volume, surface = divergence_identity_sides(d, h, alpha, order, mesh_res)
    return abs(volume - surface)


def surface_cross_functional(mesh, h):
    """``int_S h(s) (N(s) x s) ds`` by mesh quadrature (a 3-vector)."""
    s = mesh.vertices
    return mesh.node_areas @ (h(s)[:, None] * np.cross(mesh.node_normals, s))


# --------------------------------------------------------------------------
# exterior potential gap


def exterior_potential_gap(d1, d2, sample_points, order):
    """``max |u1(x) - u2(x)|`` over the samples (all exterior to both domains)."""
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    u1 = newtonian_direct(d1, pts, order)
    u2 = newtonian_direct(d2, pts, order)
    return float(np.max(np.abs(u1 - u2)))


def far_field_gap_bound(discrepancy, ell, radius):
    """Lower bound used when relating a moment mismatch to a potential gap."""
    return discrepancy / (4.0 * math.pi * radius ** (ell + 1)) / 2.0
