"""Acceptance criteria 1-10.

Each test records ``(passed, detail)`` in the session log and prints one
``criterion k: PASS|FAIL`` line; the terminal summary repeats all of them.
Run with ``pytest tests/test_acceptance.py -v -s``.
"""
import json
import math
import time

import numpy as np
import pytest

from capillary.cli import EXIT_FAIL, main
from capillary.config import CapillaryConfig
from capillary.demos import demo_config
from capillary.diagnostics import (point_set_hausdorff, quadrature_moment_error,
                                   verify_mean_curvature, verify_symmetry, verify_uniqueness)
from capillary.errors import GeometryError
from capillary.minkowski import area_residual, solve_minkowski
from capillary.pipeline import area_identity_check, contact_angles, run
from capillary.polytope import polytope_from_support, steiner_align, volume_gradient

from conftest import DEMO_NAMES, cube_atoms, tetra_normals


def record(log, k, ok, detail):
    log[k] = (bool(ok), detail)
    print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def fit_sphere(X):
    A = np.hstack([2 * X, np.ones((len(X), 1))])
    sol, *_ = np.linalg.lstsq(A, np.sum(X * X, axis=1), rcond=None)
    return sol[:3], math.sqrt(sol[3] + sol[:3] @ sol[:3])


def test_criterion_01_sphere_case(acceptance_log):
    t0 = time.perf_counter()
    out = run(demo_config("sphere-m1"), 5, diagnostics=False)
    runtime = time.perf_counter() - t0
    c, _ = fit_sphere(out.sigma.vertices)
    d = np.linalg.norm(out.sigma.vertices - c, axis=1)
    plane = out.planes[0].support - c @ out.planes[0].normal
    disk = out.disks[0]
    area_err = abs(disk.area - 3 * math.pi) / (3 * math.pi)
    per_err = abs(disk.perimeter - 2 * math.pi * math.sqrt(3)) / (2 * math.pi * math.sqrt(3))
    ok = (1.96 <= d.min() and d.max() <= 2.04 and abs(plane - 1.0) <= 0.02
          and area_err < 0.01 and per_err < 0.01 and runtime < 60)
    record(acceptance_log, 1, ok,
           f"radius [{d.min():.5f}, {d.max():.5f}], plane {plane:.5f}, disk area err "
           f"{area_err:.2e}, perimeter err {per_err:.2e}, {runtime:.1f}s")


def test_criterion_02_area_identity(demo_run, acceptance_log):
    rows, ok = [], True
    for name in DEMO_NAMES:
        res = [area_identity_check(demo_run(name, lv)) for lv in (3, 4, 5)]
        worst = [float(r.max()) for r in res]
        mono = all(np.all(b < a) for a, b in zip(res, res[1:]))
        ok &= mono and worst[-1] < 0.01
        rows.append(f"{name} {worst[-1]:.1e}{'' if mono else ' (not monotone)'}")
    record(acceptance_log, 2, ok, "; ".join(rows))


def test_criterion_03_contact_angles(demo_run, acceptance_log):
    worst_mean, worst_dev = 0.0, 0.0
    for name in DEMO_NAMES:
        out = demo_run(name, 5)
        for f, (mean, dev) in zip(out.config.faces, contact_angles(out)):
            worst_mean = max(worst_mean, abs(math.degrees(mean - f.theta)))
            worst_dev = max(worst_dev, math.degrees(dev))
    ok = worst_mean < 0.5 and worst_dev < 1.0
    record(acceptance_log, 3, ok,
           f"worst mean offset {worst_mean:.2e} deg, worst deviation {worst_dev:.2e} deg")


def test_criterion_04_solver_exactness(acceptance_log):
    details, ok = [], True
    for label, u, f in (("cube", *cube_atoms()),
                        ("tetrahedron", tetra_normals(), np.full(4, 6 * math.sqrt(3)))):
        t0 = time.perf_counter()
        hv, P = solve_minkowski((u, f))
        runtime = time.perf_counter() - t0
        res = area_residual(P, f) / np.max(np.abs(f))
        exact = steiner_align(polytope_from_support(u, np.ones(len(f))))
        err = point_set_hausdorff(P.vertices, exact.vertices)
        h_err = float(np.max(np.abs(hv.h - 1.0)))
        ok &= res < 1e-10 and err < 1e-8 and runtime < 1.0 and h_err < 1e-8
        details.append(f"{label} residual {res:.1e} vertex err {err:.1e} {runtime:.3f}s")
    record(acceptance_log, 4, ok, "; ".join(details))


def random_body(rng):
    while True:
        n = int(rng.integers(10, 101))
        u = rng.normal(size=(n, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        h = rng.uniform(0.8, 1.2, n)
        try:
            polytope_from_support(u, h)
        except GeometryError:
            continue
        return u, h


def test_criterion_05_gradient_oracle(acceptance_log):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        u, h = random_body(rng)
        g = volume_gradient(u, h)
        fd = np.empty(len(h))
        for i in range(len(h)):
            e = np.zeros(len(h))
            e[i] = 1e-6
            fd[i] = (polytope_from_support(u, h + e).volume
                     - polytope_from_support(u, h - e).volume) / 2e-6
        worst = max(worst, float(np.max(np.abs(g - fd)) / np.max(np.abs(g))))
    runtime = time.perf_counter() - t0
    record(acceptance_log, 5, worst < 1e-5 and runtime < 30,
           f"worst relative error {worst:.1e} over 50 bodies, {runtime:.1f}s")


def test_criterion_06_quadrature_halving(acceptance_log):
    cfg = demo_config("equatorial-m3")
    err = [quadrature_moment_error(cfg, lv) for lv in (3, 4, 5)]
    ratios = [err[1] / err[0], err[2] / err[1]]
    record(acceptance_log, 6, all(r <= 0.5 for r in ratios),
           f"moment errors {', '.join(f'{e:.2e}' for e in err)}, "
           f"ratios {ratios[0]:.2f}, {ratios[1]:.2f} (need <= 0.5)")


def test_criterion_07_uniqueness(acceptance_log):
    worst, rows = 0.0, []
    for name in DEMO_NAMES:
        dist, diam = verify_uniqueness(demo_config(name), 5)
        worst = max(worst, dist / diam)
        rows.append(f"{name} {dist / diam:.1e}")
    record(acceptance_log, 7, worst < 1e-3, "Hausdorff/diameter " + "; ".join(rows))


def test_criterion_08_symmetry(demo_run, acceptance_log):
    m3 = demo_run("equatorial-m3", 5)
    mirror = verify_symmetry(m3, [0, 0, 1]) / m3.diameter
    ra = demo_run("rightangle-m2", 5)
    j = next(i for i, f in enumerate(ra.config.faces) if abs(f.theta - math.pi / 2) < 1e-12)
    mean, dev = contact_angles(ra)[j]
    worst = max(abs(math.degrees(mean) - 90.0), math.degrees(dev))
    record(acceptance_log, 8, mirror < 1e-3 and worst < 1.0,
           f"m3 horizontal mirror {mirror:.1e}*diameter, right angle within {worst:.1e} deg")


def test_criterion_09_patch_radius(demo_run, acceptance_log):
    worst = 0.0
    for name in DEMO_NAMES:
        out = demo_run(name, 5)
        worst = max(worst, verify_mean_curvature(out.sigma, out.config.H).patch_radius_error)
    record(acceptance_log, 9, worst < 1e-12, f"worst relative radius error {worst:.1e}")


def test_criterion_10_check_gate(tmp_path, acceptance_log):
    def write(name, faces):
        path = tmp_path / name
        path.write_text(json.dumps({"H": 0.5, "faces": [
            {"p": p, "theta_deg": t, "a": a} for p, t, a in faces]}))
        return str(path)

    forced = math.pi * math.sin(math.radians(150)) ** 2
    cases = {
        "m2 non-antipodal, a != forced": write(
            "m2.json", [([0, 0, 1], 150.0, 1.0), ([1, 0, 0], 150.0, 1.0)]),
        "overlapping caps": write(
            "ov.json", [([0, 0, 1], 100.0, 1.0), ([1, 0, 0], 100.0, 1.0),
                        ([-1, 0, -1], 100.0, math.sqrt(2))]),
        "unbalanced areas": write("ub.json", [([0, 0, 1], 120.0, 3.0)]),
    }
    codes = {k: main(["check", "--config", v]) for k, v in cases.items()}
    accepted = main(["check", "--config", write(
        "ok.json", [([0, 0, 1], 150.0, forced), ([1, 0, 0], 150.0, forced)])])
    ok = all(c == EXIT_FAIL for c in codes.values()) and accepted == 0
    record(acceptance_log, 10, ok,
           ", ".join(f"{k} -> {c}" for k, c in codes.items())
           + f", forced value accepted -> {accepted}")
