"""Spherical special functions.

Conventions
-----------
Complex spherical harmonics carry the Condon-Shortley phase and are
orthonormal on the unit sphere::

    Y_lm(theta, phi) = Pbar_l^m(cos theta) * exp(i m phi),
    Y_l,-m = (-1)^m conj(Y_lm)

where ``Pbar`` already contains the normalization ``sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)``.

Real harmonics (used for domain shapes) are::

    m > 0:  sqrt(2) (-1)^m Re Y_lm
    m = 0:  Y_l0
    m < 0:  sqrt(2) (-1)^m Im Y_l|m|

Harmonic tables are indexed ``[l, m + L, ...]`` with unused slots zero.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError

MAX_DEGREE = 64
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SphericalIndex:
    ell: int
    m: int

    def __post_init__(self):
        if self.ell < 0 or abs(self.m) > self.ell:
            raise DomainError(f"invalid spherical index (l={self.ell}, m={self.m})")


def as_unit_vector(v, tol=UNIT_TOL):
    """Return *v* as a float array after checking it has unit length."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DomainError(f"expected a 3-vector, got shape {v.shape}")
    if abs(float(v @ v) - 1.0) > tol:
        raise DomainError(f"not a unit vector: |v|^2 = {float(v @ v)!r}")
    return v


def _check_degree(ell):
    if not (0 <= ell <= MAX_DEGREE) or int(ell) != ell:
        raise DomainError(f"degree {ell} outside supported range 0..{MAX_DEGREE}")


# --------------------------------------------------------------------------
# spherical Bessel functions


def _j_series(ell, x):
    # x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    lead = 1.0
    for n in range(1, ell + 1):
        lead *= x / (2 * n + 1)
    term = 1.0
    total = 1.0
    q = -0.5 * x * x
    for k in range(1, 200):
        term *= q / (k * (2 * ell + 2 * k + 1))
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return lead * total


def _j_downward(lmax, x):
    """j_0..j_lmax at x > 0 by Miller's backward recurrence."""
    start = max(lmax, int(x)) + 30 + int(4.0 * math.sqrt(max(lmax, x)))
    out = np.zeros(lmax + 1)
    f_next, f = 0.0, 1e-300
    for n in range(start, 0, -1):
        # f holds the unnormalized j_n, f_next holds j_{n+1}
        f_prev = (2 * n + 1) / x * f - f_next
        f_next, f = f, f_prev
        if abs(f) > 1e250:
            f_next *= 1e-250
            f *= 1e-250
            out *= 1e-250
        if n - 1 <= lmax:
            out[n - 1] = f
        if n <= lmax:
            out[n] = f_next
    j0 = math.sin(x) / x
    j1 = math.sin(x) / (x * x) - math.cos(x) / x
    # j0 and j1 never vanish together; normalize on the larger one
    if abs(j0) >= abs(j1) or lmax == 0:
        return out * (j0 / out[0])
    return out * (j1 / out[1])


def spherical_bessel_j_table(lmax, x):
    """Array ``[j_0(x), ..., j_lmax(x)]``."""
    _check_degree(lmax)
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"spherical_bessel_j needs finite x >= 0, got {x}")
    if x == 0.0:
        out = np.zeros(lmax + 1)
        out[0] = 1.0
        return out
    out = _j_downward(lmax, x) if x >= 0.5 else np.zeros(lmax + 1)
    for ell in range(lmax + 1):
        if x < 0.5 * ell or x < 0.5:
            out[ell] = _j_series(ell, x)
    return out


def spherical_bessel_j(ell, x):
    """Spherical Bessel function of the first kind ``j_l(x)`` for ``x >= 0``."""
    _check_degree(ell)
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"spherical_bessel_j needs finite x >= 0, got {x}")
    if x == 0.0:
        return 1.0 if ell == 0 else 0.0
    if ell == 0:
        return math.sin(x) / x
    if x < 0.5 * ell:
        return _j_series(ell, x)
    return float(_j_downward(ell, x)[ell])


def spherical_bessel_y_table(lmax, x):
    """``[y_0(x), ..., y_lmax(x)]`` by upward recurrence (stable for y)."""
    _check_degree(lmax)
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"spherical_bessel_y needs finite x > 0, got {x}")
    out = np.empty(lmax + 1)
    out[0] = -math.cos(x) / x
    if lmax >= 1:
        out[1] = -math.cos(x) / (x * x) - math.sin(x) / x
    for n in range(1, lmax):
        out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    return out


def spherical_bessel_y(ell, x):
    """Spherical Bessel function of the second kind ``y_l(x)`` for ``x > 0``."""
    return float(spherical_bessel_y_table(ell, x)[ell])


def _derivative(table, ell, x):
    if ell == 0:
        return -table[1]
    return table[ell - 1] - (ell + 1) / x * table[ell]


def spherical_bessel_j_derivative(ell, x):
    x = float(x)
    if x == 0.0:
        return 1.0 / 3.0 if ell == 1 else 0.0
    return float(_derivative(spherical_bessel_j_table(ell + 1, x), ell, x))


def spherical_bessel_y_derivative(ell, x):
    return float(_derivative(spherical_bessel_y_table(ell + 1, x), ell, x))


def spherical_hankel1(ell, x):
    """``h_l(x) = j_l(x) + i y_l(x)``; singular at the origin so ``x > 0``."""
    _check_degree(ell)
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"spherical_hankel1 needs finite x > 0, got {x}")
    return complex(spherical_bessel_j(ell, x), spherical_bessel_y(ell, x))


# --------------------------------------------------------------------------
# spherical harmonics


def normalized_legendre(lmax, cos_theta, sin_theta=None):
    """Orthonormalized associated Legendre values ``Pbar_l^m``, ``0 <= m <= l``.

    Returns an array of shape ``(lmax+1, lmax+1) + cos_theta.shape`` indexed
    ``[l, m]``. Includes the Condon-Shortley phase and the ``1/sqrt(4 pi)``
    factor, so ``Y_lm = Pbar_l^m * exp(i m phi)``.
    """
    _check_degree(lmax)
    x = np.asarray(cos_theta, dtype=float)
    if sin_theta is None:
        s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    else:
        s = np.asarray(sin_theta, dtype=float)
    p = np.zeros((lmax + 1, lmax + 1) + x.shape)
    p[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, lmax + 1):
        p[m, m] = -math.sqrt((2 * m + 1) / (2.0 * m)) * s * p[m - 1, m - 1]
    for m in range(0, lmax):
        p[m + 1, m] = math.sqrt(2 * m + 3) * x * p[m, m]
    for m in range(0, lmax + 1):
        for ell in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1.0) ** 2 - m * m) / (4.0 * (ell - 1.0) ** 2 - 1.0))
            p[ell, m] = a * (x * p[ell - 1, m] - b * p[ell - 2, m])
    return p


def _angles(directions):
    d = np.asarray(directions, dtype=float)
    norm = np.linalg.norm(d, axis=-1)
    safe = np.where(norm > 0, norm, 1.0)
    cos_t = np.where(norm > 0, d[..., 2] / safe, 1.0)
    sin_t = np.hypot(d[..., 0], d[..., 1]) / safe
    phi = np.arctan2(d[..., 1], d[..., 0])
    return np.clip(cos_t, -1.0, 1.0), sin_t, phi


def sph_harm_table(lmax, directions):
    """Complex ``Y_lm`` for all ``l <= lmax`` at an array of directions.

    *directions* has shape ``(..., 3)`` and need not be normalized (only
    the direction is used). The result has shape ``(lmax+1, 2*lmax+1, ...)``.
    """
    cos_t, sin_t, phi = _angles(directions)
    p = normalized_legendre(lmax, cos_t, sin_t)
    out = np.zeros((lmax + 1, 2 * lmax + 1) + cos_t.shape, dtype=complex)
    for m in range(0, lmax + 1):
        e = np.exp(1j * m * phi)
        for ell in range(m, lmax + 1):
            y = p[ell, m] * e
            out[ell, lmax + m] = y
            if m:
                out[ell, lmax - m] = (-1) ** m * np.conj(y)
    return out


def complex_to_real_table(table, lmax):
    """Map a complex ``[l, m + lmax]`` table (or its derivatives) to real harmonics.

    Only the ``m >= 0`` entries are read, so derivative tables of ``Y_lm`` map
    to the same derivatives of the real harmonics.
    """
    out = np.zeros(table.shape, dtype=float)
    root2 = math.sqrt(2.0)
    out[:, lmax] = table[:, lmax].real
    for m in range(1, lmax + 1):
        sign = (-1) ** m
        out[:, lmax + m] = root2 * sign * table[:, lmax + m].real
        out[:, lmax - m] = root2 * sign * table[:, lmax + m].imag
    return out


def real_sph_harm_table(lmax, directions):
    """Real harmonics in the same ``[l, m + lmax]`` layout as :func:`sph_harm_table`."""
    return complex_to_real_table(sph_harm_table(lmax, directions), lmax)


def spherical_harmonic(idx, direction):
    """``Y_lm`` at a unit *direction*; *idx* is a :class:`SphericalIndex` or ``(l, m)``."""
    if not isinstance(idx, SphericalIndex):
        idx = SphericalIndex(*idx)
    _check_degree(idx.ell)
    d = as_unit_vector(direction)
    return complex(sph_harm_table(idx.ell, d)[idx.ell, idx.ell + idx.m])


def real_spherical_harmonic(idx, direction):
    if not isinstance(idx, SphericalIndex):
        idx = SphericalIndex(*idx)
    _check_degree(idx.ell)
    d = as_unit_vector(direction)
    return float(real_sph_harm_table(idx.ell, d)[idx.ell, idx.ell + idx.m])


def sph_harm_theta_derivative(table, lmax, phi):
    """``d Y_lm / d theta`` from a complex table, via the ladder relation.

    Uses ``2 dY_lm/dtheta = e^{-i phi} c+ Y_l,m+1 - e^{i phi} c- Y_l,m-1``
    which has no pole singularity.
    """
    out = np.zeros_like(table)
    ep = np.exp(1j * np.asarray(phi))
    for ell in range(1, lmax + 1):
        for m in range(-ell, ell + 1):
            acc = 0.0
            if m < ell:
                acc = acc + math.sqrt((ell - m) * (ell + m + 1)) * table[ell, lmax + m + 1] / ep
            if m > -ell:
                acc = acc - math.sqrt((ell + m) * (ell - m + 1)) * table[ell, lmax + m - 1] * ep
            out[ell, lmax + m] = 0.5 * acc
    return out


# --------------------------------------------------------------------------
# solid harmonics r^l Y_lm


def solid_harmonic_table(lmax, points):
    """``|y|^l Y_lm(y/|y|)`` for all ``l <= lmax``; shape ``(lmax+1, 2 lmax+1, n)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(pts, axis=-1)
    table = sph_harm_table(lmax, pts)
    for ell in range(lmax + 1):
        table[ell] *= r**ell
    return table


def solid_harmonic_gradient(ell, m, points):
    """Cartesian gradient of ``r^l Y_lm`` (complex, shape ``(n, 3)``).

    Lowers the degree by one::

        d_z R_lm        =  c  sqrt((l+m)(l-m))     R_{l-1,m}
        (d_x + i d_y) R =   c sqrt((l-m)(l-m-1))   R_{l-1,m+1}
        (d_x - i d_y) R =  -c sqrt((l+m)(l+m-1))   R_{l-1,m-1}

    with ``c = sqrt((2l+1)/(2l-1))`` and ``R_lm = r^l Y_lm``.
    """
    SphericalIndex(ell, m)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    if ell == 0:
        return np.zeros((n, 3), dtype=complex)
    low = solid_harmonic_table(ell - 1, pts)[ell - 1]
    L = ell - 1

    def lower(mm):
        if abs(mm) > L:
            return np.zeros(n, dtype=complex)
        return low[L + mm]

    c = math.sqrt((2 * ell + 1) / (2 * ell - 1))
    dz = c * math.sqrt((ell + m) * (ell - m)) * lower(m)
    plus = c * math.sqrt(max((ell - m) * (ell - m - 1), 0)) * lower(m + 1)
    minus = -c * math.sqrt(max((ell + m) * (ell + m - 1), 0)) * lower(m - 1)
    dx = 0.5 * (plus + minus)
    dy = (plus - minus) / 2j
    return np.stack([dx, dy, dz], axis=-1)
