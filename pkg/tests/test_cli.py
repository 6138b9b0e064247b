import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest

from potlab import cli
from potlab.geometry import Ball, StarShaped
from potlab.schemas import load_schema

from .conftest import STAR_COEFFS


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_domain_files_validate(domain_file, star):
    schema = load_schema("domain")
    for d in (star, Ball((0, 0, 1), 2.0)):
        jsonschema.validate(json.load(open(domain_file(d))), schema)


def test_potential_csv(capsys, domain_file, unit_ball):
    code, out, _ = run(capsys, "potential", "--domain", domain_file(unit_ball), "--radii", "2", "--points", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["method"] for r in rows} == {"direct", "multipole", "difference"}
    for r in rows:
        if r["method"] != "difference":
            assert float(r["re"]) == pytest.approx(1 / 6, abs=1e-12)


def test_potential_json_schema(capsys, domain_file, unit_ball):
    code, out, _ = run(capsys, "potential", "--domain", domain_file(unit_ball), "--k", "1.5", "--points", "4", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    jsonschema.validate(rows, load_schema("potential_rows"))
    assert {r["method"] for r in rows} == {"direct", "closed_form", "difference"}
    assert max(abs(r["re"]) for r in rows if r["method"] == "difference") < 1e-10


def test_potential_flags_near_singular(capsys, domain_file, unit_ball):
    code, out, _ = run(capsys, "potential", "--domain", domain_file(unit_ball), "--radii", "1.05", "--points", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    jsonschema.validate(rows, load_schema("potential_rows"))
    assert all(r["method"] == "flagged:near-singular" and r["re"] is None for r in rows)


def test_potential_deterministic(capsys, domain_file, star, tmp_path):
    path = domain_file(star)
    outs = []
    for name in ("a.csv", "b.csv"):
        target = tmp_path / name
        assert cli.main(["potential", "--domain", path, "--points", "5", "--seed", "4", "--out", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    other = tmp_path / "c.csv"
    cli.main(["potential", "--domain", path, "--points", "5", "--seed", "5", "--out", str(other)])
    assert other.read_bytes() != outs[0]


def test_moments_mismatch_exit_one(capsys, domain_file):
    a = domain_file(Ball((0, 0, 0), 1.0), "a.json")
    b = domain_file(Ball((0, 0, 0.5), 1.0), "b.json")
    code, out, _ = run(capsys, "moments", "--domain", a, "--domain2", b, "--L", "4")
    assert code == 1
    verdict = json.loads(out)
    jsonschema.validate(verdict, load_schema("moment_verdict"))
    assert verdict["first_mismatch"] == {"l": 1, "m": 0}
    assert verdict["max_discrepancy"] == pytest.approx(math.sqrt(3 / (4 * math.pi)) * (4 * math.pi / 3) * 0.5, abs=1e-6)


def test_moments_match_exit_zero(capsys, domain_file, star):
    a = domain_file(star, "a.json")
    code, out, _ = run(capsys, "moments", "--domain", a, "--domain2", a)
    assert code == 0
    verdict = json.loads(out)
    jsonschema.validate(verdict, load_schema("moment_verdict"))
    assert verdict["matched"] is True and verdict["first_mismatch"] is None


def test_transparency(capsys):
    code, out, _ = run(capsys, "transparency", "--k", "1", "--n", "2", "--points", "6")
    assert code == 0
    roots = json.loads(out)
    jsonschema.validate(roots, load_schema("transparency"))
    assert [r["n"] for r in roots] == [1, 2]
    assert roots[0]["x"] == pytest.approx(4.493409457909064, abs=1e-13)
    assert all(r["verify"] <= 1e-8 for r in roots)


def test_transparency_failed_check_exits_one(capsys):
    # a tolerance below the quadrature floor makes the verification fail
    code, _, _ = run(capsys, "transparency", "--k", "1", "--n", "1", "--points", "4", "--order", "6", "--tol", "1e-14")
    assert code == 1


def test_geometry_reports(capsys, domain_file, star):
    schema = load_schema("geometry")
    cases = [
        (Ball((0, 0, 0), 1.0), "sphere"),
        (Ball((0.5, 0, 0), 1.0), "not a sphere (about the origin)"),
        (star, "not a sphere"),
    ]
    for d, verdict in cases:
        code, out, _ = run(capsys, "geometry", "--domain", domain_file(d), "--mesh-res", "16")
        assert code == 0
        report = json.loads(out)
        jsonschema.validate(report, schema)
        assert report["verdict"] == verdict
        assert 90 <= report["rotation_derivative"]["ratio"] <= 110


@pytest.mark.parametrize(
    "argv",
    [
        ["potential"],
        ["potential", "--domain", "/nonexistent.json"],
        ["moments", "--domain", "{a}"],
        ["transparency"],
        ["transparency", "--k", "-1"],
        ["transparency", "--k", "1", "--n", "0"],
        ["potential", "--domain", "{a}", "--order", "1"],
        ["geometry", "--domain", "{a}", "--mesh-res", "4"],
        ["potential", "--domain", "{bad}"],
        ["potential", "--domain", "{a}", "--L", "40"],
    ],
)
def test_usage_errors_exit_two(capsys, domain_file, tmp_path, argv):
    a = domain_file(Ball((0, 0, 0), 1.0))
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "cube"}')
    argv = [v.format(a=a, bad=bad) for v in argv]
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.startswith("potlab ")


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["potential", "--k", "abc"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    path = tmp_path / "d.json"
    path.write_text(json.dumps(StarShaped((0, 0, 0), STAR_COEFFS).to_dict()))
    res = subprocess.run(
        [sys.executable, "-m", "potlab", "geometry", "--domain", str(path), "--mesh-res", "12"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["verdict"] == "not a sphere"
