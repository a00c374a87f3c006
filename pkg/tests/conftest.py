import math

import numpy as np
import pytest
from hypothesis import settings

from capillary.demos import demo_config
from capillary.pipeline import run

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

DEMO_NAMES = ["sphere-m1", "antipodal-m2", "equatorial-m3", "tetrahedral-m4", "rightangle-m2"]

_RUNS = {}
_ACCEPTANCE = {}


def cached_run(name, level):
    """Pipeline output for a demo, computed once per session (no report)."""
    key = (name, level)
    if key not in _RUNS:
        _RUNS[key] = run(demo_config(name), level, diagnostics=False)
    return _RUNS[key]


@pytest.fixture(scope="session")
def demo_run():
    return cached_run


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def cube_atoms():
    u = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)
    return u, np.full(6, 4.0)


def tetra_normals():
    return np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float) / math.sqrt(3.0)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
