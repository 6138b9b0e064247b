import json
import math

import pytest

from potlab.geometry import Ball, StarShaped

STAR_COEFFS = [(0, 0, math.sqrt(4 * math.pi)), (2, 0, 0.2)]


@pytest.fixture
def unit_ball():
    return Ball((0.0, 0.0, 0.0), 1.0)


@pytest.fixture
def star():
    return StarShaped((0.0, 0.0, 0.0), STAR_COEFFS)


@pytest.fixture
def domain_file(tmp_path):
    def write(d, name="d.json"):
        path = tmp_path / name
        path.write_text(json.dumps(d.to_dict()))
        return str(path)

    return write


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
