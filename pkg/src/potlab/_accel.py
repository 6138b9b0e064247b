"""Pairwise kernel sums over quadrature nodes.

Every potential in the package reduces to ``sum_j w_j K(x_i, y_j)`` for a
batch of targets ``x_i``. Those loops are compiled with numba when it is
importable and ``POTLAB_DISABLE_NUMBA`` is unset; otherwise a chunked
numpy implementation is used. Both paths return identical results up to
summation order.

``POTLAB_THREADS`` caps the numba thread pool.
"""
import os

import numpy as np

FOUR_PI = 4.0 * np.pi


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _env_flag("POTLAB_DISABLE_NUMBA")

if HAS_NUMBA and numba.config.THREADING_LAYER == "default":
    # the installed TBB is too old for numba; omp is thread-safe as well
    numba.config.THREADING_LAYER = "omp"

if USE_NUMBA:
    _threads = os.environ.get("POTLAB_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


# --------------------------------------------------------------------------
# numpy reference path

# Targets per chunk; keeps the (chunk, nodes) distance matrix near 16 MB.
_CHUNK_ELEMENTS = 2_000_000


def _chunks(n_targets, n_nodes):
    step = max(1, _CHUNK_ELEMENTS // max(n_nodes, 1))
    for start in range(0, n_targets, step):
        yield slice(start, min(start + step, n_targets))


def _distances(targets, nodes):
    diff = targets[:, None, :] - nodes[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def newtonian_sum_numpy(targets, nodes, weights):
    out = np.empty(targets.shape[0])
    for sl in _chunks(targets.shape[0], nodes.shape[0]):
        out[sl] = (weights / _distances(targets[sl], nodes)).sum(axis=1)
    return out / FOUR_PI


def helmholtz_sum_numpy(targets, nodes, weights, k):
    out = np.empty(targets.shape[0], dtype=complex)
    for sl in _chunks(targets.shape[0], nodes.shape[0]):
        dist = _distances(targets[sl], nodes)
        out[sl] = (weights * np.exp(1j * k * dist) / dist).sum(axis=1)
    return out / FOUR_PI


# --------------------------------------------------------------------------
# numba path

if HAS_NUMBA:

    @numba.njit(parallel=True, fastmath=False, cache=True)
    def newtonian_sum_numba(targets, nodes, weights):
        m = targets.shape[0]
        n = nodes.shape[0]
        out = np.empty(m)
        for i in numba.prange(m):
            x0 = targets[i, 0]
            x1 = targets[i, 1]
            x2 = targets[i, 2]
            acc = 0.0
            for j in range(n):
                d0 = x0 - nodes[j, 0]
                d1 = x1 - nodes[j, 1]
                d2 = x2 - nodes[j, 2]
                acc += weights[j] / np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
            out[i] = acc / FOUR_PI
        return out

    @numba.njit(parallel=True, fastmath=False, cache=True)
    def helmholtz_sum_numba(targets, nodes, weights, k):
        m = targets.shape[0]
        n = nodes.shape[0]
        out = np.empty(m, dtype=np.complex128)
        for i in numba.prange(m):
            x0 = targets[i, 0]
            x1 = targets[i, 1]
            x2 = targets[i, 2]
            re = 0.0
            im = 0.0
            for j in range(n):
                d0 = x0 - nodes[j, 0]
                d1 = x1 - nodes[j, 1]
                d2 = x2 - nodes[j, 2]
                r = np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
                s = weights[j] / r
                re += s * np.cos(k * r)
                im += s * np.sin(k * r)
            out[i] = complex(re, im) / FOUR_PI
        return out


def _prep(targets, nodes, weights):
    targets = np.ascontiguousarray(np.atleast_2d(targets), dtype=np.float64)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    return targets, nodes, weights


def newtonian_sum(targets, nodes, weights, backend=None):
    """``sum_j w_j / (4 pi |x_i - y_j|)`` for each row ``x_i`` of *targets*."""
    targets, nodes, weights = _prep(targets, nodes, weights)
    if _pick(backend) == "numba":
        return newtonian_sum_numba(targets, nodes, weights)
    return newtonian_sum_numpy(targets, nodes, weights)


def helmholtz_sum(targets, nodes, weights, k, backend=None):
    """Same as :func:`newtonian_sum` with the outgoing kernel ``e^{ikr}/(4 pi r)``."""
    targets, nodes, weights = _prep(targets, nodes, weights)
    if _pick(backend) == "numba":
        return helmholtz_sum_numba(targets, nodes, weights, float(k))
    return helmholtz_sum_numpy(targets, nodes, weights, float(k))


def _pick(backend):
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def active_backend():
    return _pick(None)
