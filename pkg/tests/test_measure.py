import math

import numpy as np
import pytest

from capillary.config import CapillaryConfig, Face
from capillary.demos import demo_config
from capillary.diagnostics import quadrature_moment_error
from capillary.errors import ClosureError, PreconditionError
from capillary.measure import (SurfaceAreaMeasure, binned_distance, build_measure,
                               build_sequence_measure, close_measure)
from capillary.mesh import triangulate_delta

from conftest import cube_atoms

EMPTY = CapillaryConfig(0.5, ())


def test_full_sphere_atoms():
    m = build_measure(EMPTY, triangulate_delta(EMPTY, 0))
    assert len(m) == 12
    assert m.total == pytest.approx(4 * math.pi, abs=1e-12)
    assert m.closure_defect < 1e-14


def test_sphere_case_atoms():
    cfg = demo_config("sphere-m1")
    m = build_measure(cfg, triangulate_delta(cfg, 5))
    assert m.n_smooth == len(m) - 1
    j = m.dirac_index[0]
    np.testing.assert_array_equal(m.normals[j], [0, 0, 1])
    assert m.weights[j] == pytest.approx(3 * math.pi / 4, rel=1e-15)
    assert m.weights[m.smooth].sum() == pytest.approx(3 * math.pi, rel=1e-4)


def test_weights_rescaled_to_unit_offset():
    cfg = CapillaryConfig(1.0, (Face((0, 0, 1), 2 * math.pi / 3, 3 * math.pi / 16),))
    m = build_measure(cfg, triangulate_delta(cfg, 2))
    assert m.weights[m.dirac_index[0]] == pytest.approx(3 * math.pi / 4, rel=1e-15)


def test_smooth_moment_converges():
    # frozen from a refinement run: the error falls by ~4x per level
    cfg = demo_config("sphere-m1")
    errs = [quadrature_moment_error(cfg, lv) for lv in (3, 4, 5)]
    assert errs[0] > errs[1] > errs[2]
    for a, b in zip(errs, errs[1:]):
        assert b / a < 0.3
    assert errs[2] == pytest.approx(6.04e-4, rel=1e-2)


class TestClose:
    def test_cube_unchanged(self):
        u, f = cube_atoms()
        m = SurfaceAreaMeasure(u, f, np.full(6, -1))
        out = close_measure(m)
        np.testing.assert_array_equal(out.weights, f)

    def test_sphere_case(self):
        cfg = demo_config("sphere-m1")
        m = build_measure(cfg, triangulate_delta(cfg, 4))
        assert 1e-4 < m.closure_defect / m.total < 1e-2
        out = close_measure(m)
        assert out.closure_defect <= 1e-12 * out.total
        change = np.max(np.abs(out.weights / m.weights - 1))
        assert change < 0.01
        # point masses are input data: bit-for-bit identical
        d = ~m.smooth
        np.testing.assert_array_equal(out.weights[d], m.weights[d])
        assert np.all(out.weights > 0)

    def test_idempotent(self):
        cfg = demo_config("equatorial-m3")
        once = close_measure(build_measure(cfg, triangulate_delta(cfg, 3)))
        twice = close_measure(once)
        np.testing.assert_allclose(twice.weights, once.weights, rtol=1e-14)

    def test_large_defect_rejected(self):
        u = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)
        f = np.array([4, 4, 4, 4, 6, 4], float)
        with pytest.raises(ClosureError):
            close_measure(SurfaceAreaMeasure(u, f, np.full(6, -1)))


class TestSequenceMeasure:
    def test_small_cap_moment_exact(self):
        # only the small-cap atoms depend on a_j, so the difference of two
        # sequence measures isolates them: moment a p, mass a n^2/pi |B(1/n)|
        n, t = 16, 2 * math.pi / 3
        ms = [build_sequence_measure(CapillaryConfig(0.5, (Face((0, 0, 1), t, a),)), n, 3)
              for a in (1.0, 3.0)]
        d = ms[1].weights - ms[0].weights
        np.testing.assert_allclose(d @ ms[0].normals, [0, 0, 2.0], atol=1e-12)
        cap = 2 * math.pi * (1 - math.sqrt(1 - 1 / n ** 2))
        assert d.sum() == pytest.approx(2.0 * n ** 2 / math.pi * cap, rel=1e-12)
        assert np.all(ms[0].weights > 0)

    def test_converges_to_limit_measure(self):
        cfg = demo_config("sphere-m1")
        limit = build_measure(cfg, triangulate_delta(cfg, 4))
        d = [binned_distance(build_sequence_measure(cfg, n, 4), limit) for n in (8, 16, 32)]
        assert d[0] > d[1] > d[2]
        assert d[2] / d[1] < 0.6

    def test_nearly_closed(self):
        cfg = demo_config("sphere-m1")
        s = build_sequence_measure(cfg, 16, 4)
        assert s.closure_defect / s.total < 1e-3

    def test_n_too_small(self):
        with pytest.raises(PreconditionError):
            build_sequence_measure(demo_config("sphere-m1"), 4, 3)
        with pytest.raises(PreconditionError):
            build_sequence_measure(demo_config("equatorial-m3"), 3, 3)
