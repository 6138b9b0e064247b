"""Command-line front end.

    potlab potential    --domain D.json [--k K] [--radii 2,10] [--points 20] [--format csv|json]
    potlab moments      --domain D1.json --domain2 D2.json [--L 8] [--tol 1e-10]
    potlab transparency --k 1 [--n 3] [--tol 1e-8]
    potlab geometry     --domain D.json [--mesh-res 64]

Exit status: 0 success or match, 1 determinate mismatch or failed check,
2 usage or input error.
"""
import argparse
from dataclasses import dataclass, field
import io
import json
import math
import sys

import numpy as np

from . import geometry, moments, potentials, transparency
from .errors import NearSingularityError, PotlabError

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
DEFAULT_RADIUS_FACTORS = (3.0, 5.0, 10.0)
TRANSPARENCY_RADIUS_FACTORS = (1.5, 2.5, 5.0)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    domain: str = None
    domain2: str = None
    k: float = None
    L: int = None
    order: int = None
    mesh_res: int = None
    radii: list = field(default_factory=list)
    points: int = 20
    tol: float = None
    n: int = 3
    out: str = None
    format: str = None
    seed: int = 0

    def validate(self):
        if self.k is not None and not (self.k > 0 and math.isfinite(self.k)):
            raise UsageError(f"--k must be positive, got {self.k}")
        if self.L is not None and not (0 <= self.L <= potentials.MAX_MULTIPOLE_DEGREE):
            raise UsageError(f"--L must be in 0..{potentials.MAX_MULTIPOLE_DEGREE}")
        if self.order is not None and self.order < 2:
            raise UsageError("--order must be >= 2")
        if self.mesh_res is not None and self.mesh_res < 8:
            raise UsageError("--mesh-res must be >= 8")
        if self.points < 1:
            raise UsageError("--points must be >= 1")
        if any(not (r > 0) for r in self.radii):
            raise UsageError("--radii must be positive")
        if not (1 <= self.n <= transparency.MAX_ROOTS):
            raise UsageError(f"--n must be in 1..{transparency.MAX_ROOTS}")


def _float_list(text):
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="potlab", description="Potential-theory checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("potential", "moments", "transparency", "geometry"):
        p = sub.add_parser(name)
        p.add_argument("--domain")
        p.add_argument("--domain2")
        p.add_argument("--k", type=float)
        p.add_argument("--L", type=int)
        p.add_argument("--order", type=int)
        p.add_argument("--mesh-res", dest="mesh_res", type=int)
        p.add_argument("--radii", type=_float_list, default=[])
        p.add_argument("--points", type=int, default=20)
        p.add_argument("--tol", type=float)
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--seed", type=int, default=0)
    return parser


def _load(path, flag):
    if not path:
        raise UsageError(f"{flag} is required")
    try:
        return geometry.load_domain(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad domain JSON in {path}: {exc!r}")


def sample_points(radii, points, seed):
    """Fibonacci spheres at each radius, all turned by one seeded random rotation."""
    rng = np.random.default_rng(seed)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    rot = geometry.rotation_matrix(axis, rng.uniform(0.0, 2.0 * math.pi))
    base = geometry.fibonacci_sphere(points) @ rot.T
    return np.concatenate([r * base for r in radii])


def _row(x, value, method, order):
    value = complex(value)
    return {
        "x": float(x[0]),
        "y": float(x[1]),
        "z": float(x[2]),
        "re": float(value.real),
        "im": float(value.imag),
        "method": method,
        "order": order,
    }


def cmd_potential(cfg):
    d = _load(cfg.domain, "--domain")
    order = cfg.order or 16
    L = 12 if cfg.L is None else cfg.L
    r_src = geometry.enclosing_radius(d)
    radii = cfg.radii or [f * r_src for f in DEFAULT_RADIUS_FACTORS]
    pts = sample_points(radii, cfg.points, cfg.seed)
    mc = potentials.multipole_coefficients(d, L, order) if cfg.k is None else None
    rows = []
    for x in pts:
        try:
            if cfg.k is None:
                direct = potentials.newtonian_direct(d, x, order)
            else:
                direct = potentials.helmholtz_volume_direct(d, cfg.k, x, order)
        except NearSingularityError:
            rows.append(_row(x, complex(math.nan, math.nan), "flagged:near-singular", order))
            continue
        rows.append(_row(x, direct, "direct", order))
        other = None
        if cfg.k is None and np.linalg.norm(x) > r_src:
            other = potentials.newtonian_multipole_eval(mc, x, r_src)
            rows.append(_row(x, other, "multipole", L))
        elif cfg.k is not None and isinstance(d, geometry.Ball):
            other = potentials.helmholtz_ball_closed_form(d.radius, cfg.k, x, center=d.center)
            rows.append(_row(x, other, "closed_form", order))
        if other is not None:
            rows.append(_row(x, direct - other, "difference", order))
    if (cfg.format or "csv") == "csv":
        buf = io.StringIO()
        potentials.write_sweep_csv(rows, buf)
        text = buf.getvalue()
    else:
        text = _json([{k: _null_nan(v) for k, v in r.items()} for r in rows])
    return EXIT_OK, text


def cmd_moments(cfg):
    d1 = _load(cfg.domain, "--domain")
    d2 = _load(cfg.domain2, "--domain2")
    L = 8 if cfg.L is None else cfg.L
    tol = moments.DEFAULT_TOLERANCE if cfg.tol is None else cfg.tol
    verdict = moments.moment_gap(d1, d2, L, cfg.order or 16, tol=tol)
    code = EXIT_OK if verdict.matched else EXIT_MISMATCH
    return code, _json(verdict.to_dict())


def cmd_transparency(cfg):
    if cfg.k is None:
        raise UsageError("--k is required")
    order = cfg.order or 24
    tol = 1e-8 if cfg.tol is None else cfg.tol
    out = []
    ok = True
    for root in transparency.transparency_roots(cfg.n):
        a = root.x / cfg.k
        radii = cfg.radii or [f * a for f in TRANSPARENCY_RADIUS_FACTORS]
        pts = sample_points(radii, cfg.points, cfg.seed)
        try:
            check = transparency.verify_transparency(a, cfg.k, pts, order)
        except NearSingularityError as exc:
            raise UsageError(str(exc))
        ok &= check <= tol
        entry = root.to_dict(cfg.k)
        entry["verify"] = check
        out.append(entry)
    return (EXIT_OK if ok else EXIT_MISMATCH), _json(out)


def cmd_geometry(cfg):
    d = _load(cfg.domain, "--domain")
    res = cfg.mesh_res or 64
    tol = 1e-8 if cfg.tol is None else cfg.tol
    mesh = geometry.surface_mesh(d, res)
    about_origin = geometry.sphere_residual(mesh)
    centered = geometry.SurfaceMesh(
        mesh.vertices - np.asarray(d.center), mesh.triangles, mesh.node_normals, mesh.node_areas
    )
    about_center = geometry.sphere_residual(centered)
    if about_origin <= tol:
        verdict = "sphere"
    elif about_center <= tol:
        verdict = "not a sphere (about the origin)"
    else:
        verdict = "not a sphere"

    rng = np.random.default_rng(cfg.seed)
    probe = mesh.vertices[rng.choice(len(mesh.vertices), size=min(32, len(mesh.vertices)), replace=False)]
    coarse = fine = 0.0
    for axis in np.eye(3):
        for x in probe:
            coarse = max(coarse, geometry.rotation_derivative_residual(axis, x, 1e-3))
            fine = max(fine, geometry.rotation_derivative_residual(axis, x, 1e-4))
    report = {
        "sphere_residual": about_origin,
        "sphere_residual_about_center": about_center,
        "verdict": verdict,
        "tolerance": tol,
        "mesh_res": res,
        "volume": geometry.domain_volume(d),
        "area": mesh.area,
        "rotation_derivative": {
            "residual_step_1e-3": coarse,
            "residual_step_1e-4": fine,
            "ratio": coarse / fine if fine > 0 else None,
        },
    }
    return EXIT_OK, _json(report)


def _null_nan(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def _json(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


COMMANDS = {
    "potential": cmd_potential,
    "moments": cmd_moments,
    "transparency": cmd_transparency,
    "geometry": cmd_geometry,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        cfg.validate()
        code, text = COMMANDS[cfg.command](cfg)
    except (UsageError, PotlabError) as exc:
        print(f"potlab {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
