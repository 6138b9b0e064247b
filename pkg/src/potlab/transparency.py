"""Balls and spheres whose exterior Helmholtz potential vanishes.

The exterior volume potential of the ball ``|y| < a`` is
``F(a, k) exp(ik|x|)/|x|`` with ``F = (sin(ka) - ka cos(ka))/k^3``, so it
vanishes identically whenever ``ka`` is a positive root of ``tan x = x``.
The single layer on the sphere ``|t| = a`` is proportional to ``sin(ka)``
and vanishes for ``ka = n pi``.

Roots are located on ``G(x) = sin x - x cos x``, which has the same
positive zeros as ``tan x - x`` but no poles.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from .geometry import Ball
from .potentials import ball_form_factor, helmholtz_volume_direct

MAX_ROOTS = 10_000
# keeps brackets off the pole of tan and the trivial root x = 0
BRACKET_SHRINK = 1e-9


@dataclass(frozen=True)
class TransparencyRoot:
    """The ``n``-th positive root of ``tan x = x``.

    ``residual`` is the relative Newton correction ``|G(x)| / (x |G'(x)|)``
    with ``G'(x) = x sin x``; it bounds the relative error of ``x``.
    """

    n: int
    x: float
    bracket: tuple
    residual: float

    def to_dict(self, k=None):
        out = {"n": self.n, "x": self.x}
        if k is not None:
            out["a"] = self.x / k
        out["residual"] = self.residual
        return out


def transcendental(x):
    """``G(x) = sin x - x cos x``."""
    return np.sin(x) - x * np.cos(x)


def radial_integral(a, k):
    """``int_0^a r^2 j_0(kr) dr``, equal to ``(sin(ka) - ka cos(ka)) / k^3``."""
    return ball_form_factor(a, k)


def root_bracket(n):
    lo = n * math.pi + BRACKET_SHRINK
    hi = n * math.pi + 0.5 * math.pi - BRACKET_SHRINK
    return lo, hi


def _root(n):
    lo, hi = root_bracket(n)
    x = brentq(transcendental, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    g = float(transcendental(x))
    residual = abs(g) / (x * x * abs(math.sin(x)))
    return TransparencyRoot(n, float(x), (lo, hi), residual)


def transparency_roots(n_max):
    """The first *n_max* positive roots of ``tan x = x``, one per ``(n pi, n pi + pi/2)``."""
    n_max = int(n_max)
    if not (1 <= n_max <= MAX_ROOTS):
        raise ValueError(f"n_max must lie in 1..{MAX_ROOTS}, got {n_max}")
    return [_root(n) for n in range(1, n_max + 1)]


def transparency_radii(k, n_max):
    """Radii ``a_n = x_n / k`` of balls with vanishing exterior potential."""
    k = _positive(k, "k")
    return [r.x / k for r in transparency_roots(n_max)]


def surface_transparency_radii(k, n_max):
    """Radii ``n pi / k`` of spheres with vanishing exterior single layer."""
    k = _positive(k, "k")
    n_max = int(n_max)
    if not (1 <= n_max <= MAX_ROOTS):
        raise ValueError(f"n_max must lie in 1..{MAX_ROOTS}, got {n_max}")
    return [n * math.pi / k for n in range(1, n_max + 1)]


def verify_transparency(a, k, samples, order):
    """``max |U(x)|`` over *samples* for the ball of radius *a*, by raw quadrature.

    Deliberately independent of the closed form.
    """
    a = _positive(a, "a")
    values = helmholtz_volume_direct(Ball((0.0, 0.0, 0.0), a), k, np.atleast_2d(samples), order)
    return float(np.max(np.abs(values)))


def _positive(v, name):
    v = float(v)
    if not (v > 0 and math.isfinite(v)):
        raise ValueError(f"{name} must be positive and finite, got {v}")
    return v
