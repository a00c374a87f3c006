import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capillary.config import CapillaryConfig, Face, load_config, save_config
from capillary.errors import ConfigError, DomainError, RepairError
from capillary.sphere import (annulus_moment, cap_area, cap_moment, check_balancing,
                              repair_areas, sphere_areas)

from conftest import random_rotation

Z = np.array([0.0, 0.0, 1.0])


def mc_zone_moment(z_lo, z_hi, n=10_000_000, seed=0):
    """Monte-Carlo moment of the zone ``z_lo <= z <= z_hi`` about the z axis.

    Uniform points on the sphere have uniformly distributed height, so the
    zone is sampled by drawing ``z`` uniformly and the azimuth uniformly.
    """
    rng = np.random.default_rng(seed)
    z = rng.uniform(z_lo, z_hi, n)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    s = np.sqrt(1.0 - z * z)
    pts = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
    area = 2.0 * math.pi * (z_hi - z_lo)
    return area * pts.mean(axis=0)


def equatorial(thetas, areas, H=0.5):
    lon = 2 * math.pi * np.arange(3) / 3
    faces = [Face((math.cos(a), math.sin(a), 0.0), t, x) for a, t, x in zip(lon, thetas, areas)]
    return CapillaryConfig(H, tuple(faces), validate=False)


class TestCapArea:
    def test_hemisphere(self):
        assert cap_area(1.0) == pytest.approx(2 * math.pi, abs=1e-15)

    def test_small_cap_vanishes(self):
        assert cap_area(1e-8) < 1e-15

    def test_closed_form_value(self):
        assert cap_area(math.sqrt(3) / 2) == pytest.approx(math.pi, rel=1e-14)

    @pytest.mark.parametrize("r", [0.0, -0.1, 1.5])
    def test_out_of_range(self, r):
        with pytest.raises(DomainError):
            cap_area(r)


class TestCapMoment:
    def test_plug(self):
        np.testing.assert_allclose(cap_moment(Z, 0.5), [0, 0, math.pi / 4], atol=1e-15)

    def test_hemisphere(self):
        q = np.array([1.0, 2.0, 2.0]) / 3.0
        np.testing.assert_allclose(cap_moment(q, 1.0), math.pi * q, atol=1e-15)

    def test_monte_carlo(self):
        # cap of rim radius 0.8 is the zone z >= 0.6
        mc = mc_zone_moment(0.6, 1.0)
        exact = cap_moment(Z, 0.8)
        np.testing.assert_allclose(exact, [0, 0, 0.64 * math.pi], atol=1e-14)
        assert np.linalg.norm(mc - exact) < 1e-3 * np.linalg.norm(exact)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            cap_moment(Z, 1.2)

    @given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
    def test_rotation_equivariance(self, seed, r):
        R = random_rotation(np.random.default_rng(seed))
        q = np.array([0.3, -0.5, 0.8])
        q /= np.linalg.norm(q)
        np.testing.assert_allclose(cap_moment(R @ q, r), R @ cap_moment(q, r), atol=1e-13)


class TestAnnulusMoment:
    def test_plug(self):
        np.testing.assert_allclose(annulus_moment(Z, 0.5, 0.2), [0, 0, 0.45 * math.pi],
                                   atol=1e-15)

    def test_thin_limit_matches_cap(self):
        # the annulus between rim radii s and r + s with s -> 0 is the cap of radius r
        np.testing.assert_allclose(annulus_moment(Z, 0.5, 1e-12), cap_moment(Z, 0.5),
                                   atol=1e-11)

    def test_monte_carlo(self):
        r, s = 0.6, 0.3
        z_hi = math.sqrt(1 - s * s)
        z_lo = math.sqrt(1 - (r + s) ** 2)
        mc = mc_zone_moment(z_lo, z_hi, seed=1)
        exact = annulus_moment(Z, r, s)
        np.testing.assert_allclose(exact, [0, 0, 0.72 * math.pi], atol=1e-14)
        assert np.linalg.norm(mc - exact) < 1e-3 * np.linalg.norm(exact)

    @pytest.mark.parametrize("r,s", [(0.0, 0.2), (0.2, 0.0), (0.6, 0.5)])
    def test_out_of_range(self, r, s):
        with pytest.raises(DomainError):
            annulus_moment(Z, r, s)


class TestBalancing:
    def test_sphere_case(self):
        cfg = CapillaryConfig(0.5, (Face(Z, 2 * math.pi / 3, 3 * math.pi / 4),))
        assert np.linalg.norm(check_balancing(cfg)) < 1e-15

    def test_antipodal(self):
        t = 3 * math.pi / 4
        cfg = CapillaryConfig(0.5, (Face(Z, t, 1.0), Face(-Z, t, 1.0)))
        assert np.linalg.norm(check_balancing(cfg)) < 1e-15
        cfg = CapillaryConfig(0.5, (Face(Z, t, 1.7), Face(-Z, t, 1.0)))
        np.testing.assert_allclose(check_balancing(cfg), 0.7 * Z, atol=1e-15)

    def test_equatorial_perturbed(self):
        t = 2 * math.pi / 3
        cfg = equatorial([t] * 3, [3 * math.pi / 4 + 0.1, 3 * math.pi / 4, 3 * math.pi / 4])
        np.testing.assert_allclose(check_balancing(cfg), 0.1 * cfg.normals[0], atol=1e-15)

    @given(st.lists(st.floats(0.1, 5.0), min_size=3, max_size=3),
           st.lists(st.floats(0.1, 5.0), min_size=3, max_size=3),
           st.floats(-3, 3))
    def test_linear_in_areas(self, a, b, lam):
        t = [2.5, 2.6, 2.7]
        ca, cb = equatorial(t, a), equatorial(t, b)
        c = equatorial(t, np.array(a) + lam * np.array(b))
        expect = check_balancing(ca) + lam * check_balancing(cb) + lam * (
            sphere_areas(cb) @ cb.normals)
        np.testing.assert_allclose(check_balancing(c), expect, atol=1e-12)

    @given(st.integers(0, 2**32 - 1))
    def test_rotation_invariance(self, seed):
        R = random_rotation(np.random.default_rng(seed))
        cfg = equatorial([2.5, 2.6, 2.7], [1.0, 2.0, 3.0])
        rot = CapillaryConfig(cfg.H, tuple(Face(R @ f.p, f.theta, f.a) for f in cfg.faces),
                              validate=False)
        np.testing.assert_allclose(check_balancing(rot), R @ check_balancing(cfg), atol=1e-12)


class TestRepair:
    def test_balanced_unchanged(self):
        cfg = equatorial([3 * math.pi / 4] * 3, [2.0, 2.0, 2.0])
        assert repair_areas(cfg) is cfg

    def test_symmetric_correction(self):
        t = 2 * math.pi / 3
        base = 3 * math.pi / 4
        cfg = equatorial([t] * 3, [base + 0.1, base, base])
        fixed = repair_areas(cfg)
        assert np.linalg.norm(check_balancing(fixed)) <= 1e-12
        # minimum-norm correction lies in the span of the normal coordinates
        np.testing.assert_allclose(fixed.areas - cfg.areas, [-1 / 15, 1 / 30, 1 / 30],
                                   atol=1e-14)

    def test_single_face_reset(self):
        t = 2 * math.pi / 3
        cfg = CapillaryConfig(0.5, (Face(Z, t, 1.0),), validate=False)
        fixed = repair_areas(cfg)
        assert fixed.areas[0] == pytest.approx(math.pi * math.sin(t) ** 2, rel=1e-14)

    def test_infeasible(self):
        cfg = equatorial([math.radians(100), math.radians(170), math.radians(170)],
                         [0.01, 0.01, 0.01])
        with pytest.raises(RepairError):
            repair_areas(cfg)


class TestConfig:
    def test_overlapping_caps_rejected(self):
        with pytest.raises(ConfigError, match="caps intersect"):
            CapillaryConfig(0.5, (Face(Z, 2.2, 1.0), Face((1, 0, 0), 2.2, 1.0)))

    @pytest.mark.parametrize("theta", [math.pi / 3, math.pi / 2, math.pi])
    def test_angle_range(self, theta):
        with pytest.raises(ConfigError):
            CapillaryConfig(0.5, (Face(Z, theta, 1.0),))

    def test_flags(self):
        CapillaryConfig(0.5, (Face(Z, math.pi, 1.0),), allow_theta_pi=True)
        with pytest.raises(ConfigError, match="at most one"):
            CapillaryConfig(0.5, (Face(Z, math.pi / 2, 1.0), Face(-Z, math.pi / 2, 1.0)),
                            allow_theta_half_pi=True)

    def test_nonpositive(self):
        with pytest.raises(ConfigError):
            CapillaryConfig(-1.0, (Face(Z, 2.5, 1.0),))
        with pytest.raises(ConfigError):
            CapillaryConfig(0.5, (Face(Z, 2.5, 0.0),))

    def test_normal_renormalized(self):
        f = Face((0, 0, 5), 2.5, 1.0)
        assert abs(np.linalg.norm(f.p) - 1.0) < 1e-12

    def test_json_roundtrip(self, tmp_path):
        cfg = equatorial([2.5, 2.6, 2.7], [1.0, 2.0, 3.0])
        cfg = CapillaryConfig(cfg.H, cfg.faces)
        save_config(cfg, tmp_path / "c.json")
        back = load_config(tmp_path / "c.json")
        np.testing.assert_allclose(back.normals, cfg.normals, atol=1e-15)
        np.testing.assert_allclose(back.thetas, cfg.thetas, atol=1e-14)
        np.testing.assert_allclose(back.areas, cfg.areas, atol=0)

    def test_malformed(self, tmp_path):
        (tmp_path / "bad.json").write_text('{"H": 0.5, "faces": [{"p": [0, 1]}]}')
        with pytest.raises(ValueError, match="malformed"):
            load_config(tmp_path / "bad.json")
