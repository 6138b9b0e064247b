"""Time the numba and numpy kernel sums on the same quadrature rule.

    python3 benchmarks/bench_kernels.py [--order 24] [--targets 400] [--repeat 3]
"""
import argparse
import time

import numpy as np

from potlab import _accel, geometry


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--order", type=int, default=24)
    parser.add_argument("--targets", type=int, default=400)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--k", type=float, default=1.0)
    args = parser.parse_args()

    star = geometry.StarShaped((0.0, 0.0, 0.0), [(0, 0, np.sqrt(4 * np.pi)), (2, 0, 0.2)])
    rule = geometry.volume_quadrature(star, args.order)
    targets = 5.0 * geometry.fibonacci_sphere(args.targets)
    pairs = len(targets) * len(rule.nodes)
    print(f"{len(rule.nodes)} nodes x {len(targets)} targets = {pairs:.3g} pairs")

    backends = ["numpy"] + (["numba"] if _accel.HAS_NUMBA else [])
    kernels = {
        "newtonian": lambda b: _accel.newtonian_sum(targets, rule.nodes, rule.weights, backend=b),
        "helmholtz": lambda b: _accel.helmholtz_sum(targets, rule.nodes, rule.weights, args.k, backend=b),
    }
    for name, kernel in kernels.items():
        results = {}
        for b in backends:
            kernel(b)  # compile / warm caches
            results[b] = best_of(lambda: kernel(b), args.repeat)
        line = "  ".join(f"{b} {t * 1e3:8.1f} ms" for b, (t, _) in results.items())
        if len(results) == 2:
            speedup = results["numpy"][0] / results["numba"][0]
            diff = np.max(np.abs(results["numpy"][1] - results["numba"][1]) / np.abs(results["numpy"][1]))
            line += f"  speedup {speedup:5.1f}x  max rel diff {diff:.1e}"
        print(f"{name:10s} {line}")


if __name__ == "__main__":
    main()
