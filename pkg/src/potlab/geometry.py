"""Domains, quadrature rules and surface meshes.

Two domain families are supported: balls and domains that are star-shaped
about a center, with boundary ``c + rho(w) w`` and ``rho`` a finite sum of
real spherical harmonics. Everything downstream (potentials, moments)
works from a :class:`QuadratureRule` or a :class:`SurfaceMesh`.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy.optimize import minimize

from . import specfun
from .errors import DegenerateInputError, DomainError

# directions sampled when validating rho > 0
POSITIVITY_SAMPLES = (100, 200)


# --------------------------------------------------------------------------
# rules on the sphere


def gauss_legendre(n, a=-1.0, b=1.0):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def sphere_product_rule(n_theta, n_phi=None):
    """Gauss-Legendre in ``cos(theta)`` times the trapezoid rule in ``phi``.

    Integrates spherical harmonics exactly up to degree ``2 n_theta - 1``
    (and order ``|m| < n_phi``). Returns ``(directions, weights)``; the
    weights sum to ``4 pi``.
    """
    if n_phi is None:
        n_phi = 2 * n_theta
    mu, w_mu = gauss_legendre(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1.0 - mu * mu)
    dirs = np.empty((n_theta, n_phi, 3))
    dirs[..., 0] = sin_t[:, None] * np.cos(phi)[None, :]
    dirs[..., 1] = sin_t[:, None] * np.sin(phi)[None, :]
    dirs[..., 2] = mu[:, None]
    weights = np.repeat(w_mu * (2.0 * np.pi / n_phi), n_phi)
    return dirs.reshape(-1, 3), weights


def fibonacci_sphere(n):
    """Deterministic, nearly uniform set of *n* unit vectors."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = np.pi * (3.0 - math.sqrt(5.0)) * i
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError(f"ball radius must be positive, got {self.radius}")

    def radial(self, directions):
        return np.full(np.shape(directions)[:-1], self.radius)

    @property
    def max_radius(self):
        return self.radius

    def to_dict(self):
        return {"type": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class StarShaped:
    """Domain ``{c + r w : 0 <= r < rho(w)}`` with ``rho = sum c_lm Yreal_lm``.

    *coeffs* is a sequence of ``(l, m, c)`` triples. A constant radius ``a``
    is ``[(0, 0, a * sqrt(4 pi))]``.
    """

    center: tuple
    coeffs: tuple
    _max_radius: float = field(default=0.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        merged = {}
        for ell, m, c in self.coeffs:
            specfun.SphericalIndex(int(ell), int(m))
            key = (int(ell), int(m))
            merged[key] = merged.get(key, 0.0) + float(c)
        if not merged:
            raise DomainError("star-shaped domain needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple((l, m, c) for (l, m), c in sorted(merged.items())))
        if self.lmax > specfun.MAX_DEGREE:
            raise DomainError(f"shape degree {self.lmax} exceeds {specfun.MAX_DEGREE}")
        dirs, _ = sphere_product_rule(*POSITIVITY_SAMPLES)
        rho = self.radial(dirs)
        if not np.all(rho > 0):
            raise DomainError("radial function is not positive on the direction sample")
        object.__setattr__(self, "_max_radius", self._refine_max(dirs, rho))

    @property
    def lmax(self):
        return max(ell for ell, _, _ in self.coeffs)

    def _coeff_table(self):
        L = self.lmax
        tab = np.zeros((L + 1, 2 * L + 1))
        for ell, m, c in self.coeffs:
            tab[ell, L + m] = c
        return tab

    def radial(self, directions):
        L = self.lmax
        y = specfun.real_sph_harm_table(L, directions)
        return np.tensordot(self._coeff_table(), y, axes=([0, 1], [0, 1]))

    def radial_with_gradient(self, mu, phi):
        """``rho``, ``d rho/d theta`` and ``(d rho/d phi)/sin(theta)`` on interior angles."""
        L = self.lmax
        mu = np.asarray(mu, dtype=float)
        phi = np.asarray(phi, dtype=float)
        sin_t = np.sqrt(1.0 - mu * mu)
        p = specfun.normalized_legendre(L, mu, sin_t)
        ytab = np.zeros((L + 1, 2 * L + 1) + mu.shape, dtype=complex)
        # Y_lm / sin(theta), finite for m != 0
        ysin = np.zeros_like(ytab)
        for m in range(0, L + 1):
            e = np.exp(1j * m * phi)
            for ell in range(m, L + 1):
                ytab[ell, L + m] = p[ell, m] * e
                if m:
                    ysin[ell, L + m] = 1j * m * p[ell, m] / sin_t * e
                    ytab[ell, L - m] = (-1) ** m * np.conj(ytab[ell, L + m])
        dtheta = specfun.sph_harm_theta_derivative(ytab, L, phi)
        coeff = self._coeff_table()

        def contract(t):
            real = specfun.complex_to_real_table(t, L)
            return np.tensordot(coeff, real, axes=([0, 1], [0, 1]))

        return contract(ytab), contract(dtheta), contract(ysin)

    def _refine_max(self, dirs, rho):
        best = int(np.argmax(rho))
        d = dirs[best]
        start = np.array([math.acos(np.clip(d[2], -1, 1)), math.atan2(d[1], d[0])])

        def neg(tp):
            t, p = tp
            v = np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)])
            return -float(self.radial(v))

        res = minimize(neg, start, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        return max(float(rho[best]), -float(res.fun))

    @property
    def max_radius(self):
        return self._max_radius

    def to_dict(self):
        return {
            "type": "star",
            "center": list(self.center),
            "coeffs": [{"l": l, "m": m, "c": c} for l, m, c in self.coeffs],
        }


def _as_point(p):
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise DomainError(f"expected a finite 3-vector, got {p!r}")
    return tuple(float(v) for v in arr)


def sphere_coeffs(radius):
    """Coefficient list describing a constant radial function."""
    return [(0, 0, radius * math.sqrt(4.0 * math.pi))]


def domain_from_dict(obj):
    kind = obj.get("type")
    if kind == "ball":
        return Ball(obj["center"], obj["radius"])
    if kind == "star":
        return StarShaped(obj["center"], [(c["l"], c["m"], c["c"]) for c in obj["coeffs"]])
    raise DomainError(f"unknown domain type {kind!r}")


def domain_to_dict(d):
    return d.to_dict()


def load_domain(path):
    with open(path) as fh:
        return domain_from_dict(json.load(fh))


def domain_volume(d):
    """``|D|``; for star-shaped domains ``(1/3) int rho^3 dOmega``."""
    if isinstance(d, Ball):
        return 4.0 * math.pi * d.radius**3 / 3.0
    # rho^3 has degree 3 lmax, the rule below is exact for it
    n = max(4, (3 * d.lmax) // 2 + 2)
    dirs, w = sphere_product_rule(n, 2 * n)
    return float(w @ d.radial(dirs) ** 3) / 3.0


def enclosing_radius(d):
    """``sup |y|`` over the domain, measured from the coordinate origin."""
    return float(np.linalg.norm(d.center)) + d.max_radius


def diameter_bound(d):
    """Upper bound on the diameter (exact for balls)."""
    return 2.0 * d.max_radius


def distance_to_domain(d, points):
    """Distance from each point to the closed domain, zero inside.

    Exact for balls. For star-shaped domains the bound ``|x - c| - max rho``
    is used when it already clears the domain, otherwise the distance to a
    dense boundary sample polished by a local search.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rel = pts - np.asarray(d.center)
    r = np.linalg.norm(rel, axis=1)
    if isinstance(d, Ball):
        return np.maximum(r - d.radius, 0.0)
    out = r - d.max_radius
    close = out < 0.5 * d.max_radius
    if np.any(close):
        dirs, _ = sphere_product_rule(64, 128)
        surf = dirs * d.radial(dirs)[:, None]
        for i in np.flatnonzero(close):
            if r[i] > 0 and r[i] <= d.radial(rel[i] / r[i]):
                out[i] = 0.0
            else:
                out[i] = _boundary_distance(d, rel[i], dirs, surf)
    return np.maximum(out, 0.0)


def _boundary_distance(d, rel, dirs, surf):
    # nearest boundary sample, then a local polish over the angles
    dist = np.linalg.norm(surf - rel, axis=1)
    best = int(np.argmin(dist))
    w = dirs[best]
    start = np.array([math.acos(np.clip(w[2], -1, 1)), math.atan2(w[1], w[0])])

    def gap(tp):
        t, p = tp
        v = np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)])
        return float(np.linalg.norm(v * d.radial(v) - rel))

    res = minimize(gap, start, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return min(float(dist[best]), float(res.fun))


# --------------------------------------------------------------------------
# volume quadrature


def _freeze(obj, *names):
    for name in names:
        arr = np.array(getattr(obj, name))
        arr.flags.writeable = False
        object.__setattr__(obj, name, arr)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        _freeze(self, "nodes", "weights")

    def integrate(self, values):
        return np.asarray(values) @ self.weights

    def rotated(self, axis, angle):
        """Rule for the domain rotated about *axis* (through the origin)."""
        rot = rotation_matrix(axis, angle)
        return QuadratureRule(self.nodes @ rot.T, self.weights.copy(), self.order)


def quadrature_sizes(order):
    """``(radial, polar, azimuthal)`` node counts used for a given order."""
    return max(order, 3), 2 * order, 4 * order


def volume_quadrature(d, order):
    """Product rule over ``D``: radial Gauss-Legendre times a sphere product rule.

    Exact on balls for polynomials of total degree ``<= order``.
    """
    if int(order) != order or order < 2:
        raise ValueError(f"quadrature order must be an integer >= 2, got {order}")
    n_r, n_t, n_p = quadrature_sizes(int(order))
    dirs, w_dir = sphere_product_rule(n_t, n_p)
    t, w_t = gauss_legendre(n_r, 0.0, 1.0)
    rho = d.radial(dirs)
    nodes = np.asarray(d.center) + (t[None, :, None] * rho[:, None, None]) * dirs[:, None, :]
    weights = (w_dir * rho**3)[:, None] * (w_t * t * t)[None, :]
    return QuadratureRule(nodes.reshape(-1, 3), weights.reshape(-1), int(order))


# --------------------------------------------------------------------------
# surface meshes


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Closed triangulated surface with analytic outward normals.

    ``node_areas`` are per-vertex integration weights: ``sum f(v) a_v``
    approximates ``int_S f ds``.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    node_normals: np.ndarray
    node_areas: np.ndarray

    def __post_init__(self):
        _freeze(self, "vertices", "triangles", "node_normals", "node_areas")

    @property
    def area(self):
        return float(self.node_areas.sum())

    def integrate(self, values):
        return np.asarray(values) @ self.node_areas

    def rotated(self, axis, angle):
        rot = rotation_matrix(axis, angle)
        return SurfaceMesh(
            self.vertices @ rot.T, self.triangles, self.node_normals @ rot.T, self.node_areas.copy()
        )

    def facet_normals(self):
        v = self.vertices[self.triangles]
        n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        return n / np.linalg.norm(n, axis=1, keepdims=True)


def _latlong_triangles(n_theta, n_phi):
    # vertex 0 is the north pole, then rings top to bottom, then the south pole
    def ring(i, j):
        return 1 + i * n_phi + (j % n_phi)

    south = 1 + n_theta * n_phi
    tris = []
    for j in range(n_phi):
        tris.append((0, ring(0, j), ring(0, j + 1)))
    for i in range(n_theta - 1):
        for j in range(n_phi):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            tris.append((a, c, b))
            tris.append((b, c, d))
    for j in range(n_phi):
        tris.append((south, ring(n_theta - 1, j + 1), ring(n_theta - 1, j)))
    return np.array(tris, dtype=np.int64)


def triangle_lumped_areas(vertices, triangles):
    """One third of each incident flat triangle's area per vertex."""
    v = vertices[triangles]
    area = 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)
    out = np.zeros(len(vertices))
    for k in range(3):
        np.add.at(out, triangles[:, k], area / 3.0)
    return out


def _latlong_grid(resolution):
    n_theta, n_phi = resolution, 2 * resolution
    mu, w_mu = gauss_legendre(n_theta)
    mu, w_mu = mu[::-1], w_mu[::-1]
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    mu_g, phi_g = np.meshgrid(mu, phi, indexing="ij")
    w = np.repeat(w_mu * (2.0 * np.pi / n_phi), n_phi)
    return n_theta, n_phi, mu_g.reshape(-1), phi_g.reshape(-1), w


def _frame(mu, phi):
    s = np.sqrt(1.0 - mu * mu)
    cp, sp = np.cos(phi), np.sin(phi)
    omega = np.stack([s * cp, s * sp, mu], axis=-1)
    e_theta = np.stack([mu * cp, mu * sp, -s], axis=-1)
    e_phi = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
    return omega, e_theta, e_phi


def surface_mesh(d, resolution, weights="quadrature"):
    """Latitude-longitude triangulation of the boundary of *d*.

    *resolution* is the number of latitude rings (Gauss-Legendre in
    ``cos(theta)``); each ring has ``2 * resolution`` vertices, and the two
    poles close the mesh. Normals come from the radial parameterization.

    ``weights="quadrature"`` uses the exact surface element at the
    Gauss-Legendre x trapezoid nodes (poles get zero weight), which
    converges spectrally for smooth integrands. ``weights="triangle"``
    lumps flat-triangle areas onto vertices (second order).
    """
    if int(resolution) != resolution or resolution < 8:
        raise ValueError(f"mesh resolution must be an integer >= 8, got {resolution}")
    if weights not in ("quadrature", "triangle"):
        raise ValueError(f"unknown weights scheme {weights!r}")
    n_theta, n_phi, mu, phi, w = _latlong_grid(int(resolution))
    omega, e_theta, e_phi = _frame(mu, phi)
    if isinstance(d, Ball):
        rho = np.full(mu.shape, d.radius)
        g_theta = g_phi = np.zeros(mu.shape)
        pole_rho = np.array([d.radius, d.radius])
        pole_grad = np.zeros((2, 3))
    else:
        rho, g_theta, g_phi = d.radial_with_gradient(mu, phi)
        pole_rho, pole_grad = _pole_data(d)
    # s_theta x s_phi = rho sin(theta) * (rho w - rho_theta e_theta - rho_phi/sin e_phi)
    normal = rho[:, None] * omega - g_theta[:, None] * e_theta - g_phi[:, None] * e_phi
    jac = np.linalg.norm(normal, axis=1)
    normal /= jac[:, None]
    area = w * rho * jac

    poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    pole_normal = pole_rho[:, None] * poles - pole_grad
    pole_normal /= np.linalg.norm(pole_normal, axis=1, keepdims=True)

    center = np.asarray(d.center)
    vertices = np.vstack([poles[:1] * pole_rho[0], omega * rho[:, None], poles[1:] * pole_rho[1]])
    vertices = vertices + center
    normals = np.vstack([pole_normal[:1], normal, pole_normal[1:]])
    triangles = _latlong_triangles(n_theta, n_phi)
    if weights == "quadrature":
        node_areas = np.concatenate([[0.0], area, [0.0]])
    else:
        node_areas = triangle_lumped_areas(vertices, triangles)
    return SurfaceMesh(vertices, triangles, normals, node_areas)


def _pole_data(d):
    # tangential gradient at the poles from d(rho)/d(theta) along two meridians
    mu = np.array([1.0, 1.0, -1.0, -1.0])
    phi = np.array([0.0, 0.5 * np.pi, 0.0, 0.5 * np.pi])
    L = d.lmax
    ytab = specfun.sph_harm_table(L, _frame(mu, phi)[0])
    dtheta = specfun.sph_harm_theta_derivative(ytab, L, phi)
    coeff = d._coeff_table()
    rho = np.tensordot(coeff, specfun.complex_to_real_table(ytab, L), axes=([0, 1], [0, 1]))
    dr = np.tensordot(coeff, specfun.complex_to_real_table(dtheta, L), axes=([0, 1], [0, 1]))
    grad = np.array([[dr[0], dr[1], 0.0], [-dr[2], -dr[3], 0.0]])
    return rho[[0, 2]], grad


def ellipsoid_mesh(semi_axes, resolution, center=(0.0, 0.0, 0.0)):
    """Mesh of the ellipsoid ``sum (x_i/a_i)^2 = 1`` with analytic normals."""
    a = np.asarray(semi_axes, dtype=float)
    if a.shape != (3,) or np.any(a <= 0):
        raise DomainError(f"semi-axes must be three positive numbers, got {semi_axes!r}")
    if int(resolution) != resolution or resolution < 8:
        raise ValueError(f"mesh resolution must be an integer >= 8, got {resolution}")
    n_theta, n_phi, mu, phi, w = _latlong_grid(int(resolution))
    omega, e_theta, e_phi = _frame(mu, phi)
    pts = omega * a
    grad = pts / a**2
    normals = grad / np.linalg.norm(grad, axis=1, keepdims=True)
    # |s_theta x s_phi| / sin(theta) for s = a * w(theta, phi)
    cross = (a[[1, 2, 0]] * a[[2, 0, 1]]) * omega
    area = w * np.linalg.norm(cross, axis=1)
    poles = np.array([[0.0, 0.0, a[2]], [0.0, 0.0, -a[2]]])
    vertices = np.vstack([poles[:1], pts, poles[1:]]) + np.asarray(center, dtype=float)
    normals = np.vstack([[[0.0, 0.0, 1.0]], normals, [[0.0, 0.0, -1.0]]])
    return SurfaceMesh(
        vertices, _latlong_triangles(n_theta, n_phi), normals, np.concatenate([[0.0], area, [0.0]])
    )


# --------------------------------------------------------------------------
# rotations and the geometric checks


def rotation_matrix(axis, angle):
    """Rodrigues matrix for a rotation by *angle* about the unit *axis*."""
    k = specfun.as_unit_vector(axis)
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)


def rotation_apply(axis, angle, x):
    k = specfun.as_unit_vector(axis)
    x = np.asarray(x, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    kx = np.cross(k, x)
    kdot = x @ k
    return x * c + kx * s + np.multiply.outer(kdot, k) * (1.0 - c)


def rotation_derivative_residual(axis, x, step):
    """Central-difference derivative of ``R(phi) x`` at 0 minus ``axis x x``.

    The residual is ``O(step^2) |x|``.
    """
    if not (0.0 < step <= 1e-3):
        raise ValueError(f"step must lie in (0, 1e-3], got {step}")
    k = specfun.as_unit_vector(axis)
    x = np.asarray(x, dtype=float)
    fd = (rotation_apply(k, step, x) - rotation_apply(k, -step, x)) / (2.0 * step)
    return float(np.linalg.norm(fd - np.cross(k, x)))


def sphere_residual(mesh):
    """``max |s x N| / |s|`` over the mesh vertices (relative to the origin).

    Zero exactly when every normal is radial, i.e. for spheres centered at
    the origin.
    """
    s = mesh.vertices
    r = np.linalg.norm(s, axis=1)
    if np.any(r < 1e-14):
        raise DegenerateInputError("mesh has a vertex at the origin")
    return float(np.max(np.linalg.norm(np.cross(s, mesh.node_normals), axis=1) / r))
