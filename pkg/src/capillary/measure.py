"""Discrete surface-area measures on the sphere.

The target measure is Lebesgue measure restricted to the sphere minus the
closed caps, plus a point mass ``a_j`` at each face normal ``p_j`` (all data
normalized to ``H = 1/2``).  It is discretized as weighted atoms
``(u_i, f_i)``: one smooth atom per mesh vertex carrying a third of the
spherical area of its incident triangles, followed by one Dirac atom per face.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import spherical_angle
from .errors import ClosureError, PreconditionError
from .mesh import SphericalMesh, _delaunay_with_rims, icosphere

SMOOTH = -1


@dataclass(frozen=True)
class SurfaceAreaMeasure:
    """Atoms ``(normals[i], weights[i])``; ``kind[i]`` is -1 or the face index."""

    normals: np.ndarray
    weights: np.ndarray
    kind: np.ndarray
    mesh: SphericalMesh = None

    @property
    def n_smooth(self):
        return int(np.sum(self.kind == SMOOTH))

    @property
    def smooth(self):
        return self.kind == SMOOTH

    @property
    def dirac_index(self):
        """Map face index -> atom index of its Dirac atom."""
        idx = np.flatnonzero(self.kind != SMOOTH)
        return {int(self.kind[i]): int(i) for i in idx}

    @property
    def total(self):
        return float(np.sum(self.weights))

    def moment(self, which=None):
        w = self.weights if which is None else np.where(which, self.weights, 0.0)
        return w @ self.normals

    @property
    def closure_defect(self):
        return float(np.linalg.norm(self.moment()))

    def __len__(self):
        return len(self.weights)


def normalized_areas(config):
    """Face areas rescaled to the ``H = 1/2`` problem: ``a_j (2H)^2``."""
    return config.areas * (2.0 * config.H) ** 2


def build_measure(config, mesh):
    """Discretize the limit measure on ``mesh`` (from :func:`triangulate_delta`)."""
    w = mesh.vertex_areas()
    normals = np.concatenate([mesh.vertices, config.normals])
    weights = np.concatenate([w, normalized_areas(config)])
    kind = np.concatenate([np.full(len(w), SMOOTH), np.arange(config.m)])
    return SurfaceAreaMeasure(normals, weights, kind, mesh)


def close_measure(measure, max_defect=0.01):
    """Perturb smooth weights so the atoms have zero vector moment.

    The correction minimizes ``sum_i delta_i^2 / f_i`` over smooth atoms,
    i.e. ``delta_i = f_i <u_i, lam>``, which keeps relative changes uniform.
    Dirac weights are returned untouched.
    """
    defect = measure.moment()
    total = measure.total
    if np.linalg.norm(defect) > max_defect * total:
        raise ClosureError(f"closure defect {np.linalg.norm(defect):.3g} exceeds "
                           f"{max_defect:g} of the total mass {total:.6g}")
    s = measure.smooth
    u = measure.normals[s]
    f = measure.weights[s].copy()
    for _ in range(3):
        d = f @ u + measure.moment(~s)
        if np.linalg.norm(d) <= 1e-15 * total:
            break
        G = (u * f[:, None]).T @ u
        lam = np.linalg.solve(G, -d)
        f = f + f * (u @ lam)
    if np.any(f <= 0):
        raise ClosureError("closure correction produced non-positive weights")
    weights = measure.weights.copy()
    weights[s] = f
    return replace(measure, weights=weights)


def build_sequence_measure(config, n, level):
    """Discretize the smoothed approximating measure of index ``n``.

    With rim radii ``r_j = sin theta_j`` the sphere splits into the region
    outside the enlarged caps ``B(p_j; r_j + 1/n)`` (density 1), the annuli
    between rim radii ``1/n`` and ``r_j + 1/n``, and the small caps
    ``B(p_j; 1/n)`` (density ``a_j n^2 / pi``).  On each annulus a constant
    density ``c_j = (1/n^2 + 2 r_j/n) / (r_j^2 + 2 r_j/n)`` gives exactly the
    required moment ``pi (1/n^2 + 2 r_j/n) p_j``.  Each small cap is collapsed
    to a centre atom plus six rim atoms carrying its exact mass and moment.
    """
    r = np.sin(config.thetas)
    a = normalized_areas(config)
    if n < 1 or np.any(r + 1.0 / n >= 1.0):
        raise PreconditionError(f"n={n} too small: need r_j + 1/n < 1")
    outer = np.arcsin(r + 1.0 / n)
    inner = math.asin(1.0 / n)
    for i in range(config.m):
        for j in range(i + 1, config.m):
            if spherical_angle(config.faces[i].p, config.faces[j].p) <= outer[i] + outer[j]:
                raise PreconditionError(f"n={n} too small: enlarged caps {i},{j} meet")
    rims = []
    for j, f in enumerate(config.faces):
        rims.append((f.p, float(outer[j]), False))
        rims.append((f.p, inner, True))
    verts, tris, tag, ranges, h = _delaunay_with_rims(level, rims)
    t = tag[tris]
    # drop facets spanned by one inner rim (inside a small cap)
    inner_tag = t % 2 == 1
    drop = (t[:, 0] >= 0) & (t[:, 0] == t[:, 1]) & (t[:, 1] == t[:, 2]) & inner_tag[:, 0]
    tris = tris[~drop]
    mesh = SphericalMesh(verts, tris, {}, tag, level, h)
    dens = np.ones(len(tris))
    cen = verts[tris].mean(axis=1)
    c = (1.0 / n ** 2 + 2.0 * r / n) / (r ** 2 + 2.0 * r / n)
    for j, f in enumerate(config.faces):
        ang = spherical_angle(cen / np.linalg.norm(cen, axis=1, keepdims=True), f.p)
        dens[ang < outer[j]] = c[j]
    w = mesh.vertex_areas(dens)
    normals = [verts]
    weights = [w]
    kind = [np.full(len(w), SMOOTH)]
    cosb = math.cos(inner)
    for j, f in enumerate(config.faces):
        mass = a[j] * n ** 2 / math.pi * 2.0 * math.pi * (1.0 - math.sqrt(1.0 - 1.0 / n ** 2))
        ring_mass = (mass - a[j]) / (1.0 - cosb)
        # equally spaced inner-rim vertices carry the spread part
        rim = ranges[2 * j + 1]
        w[rim] += ring_mass / len(rim)
        normals.append(f.p[None, :])
        weights.append(np.array([mass - ring_mass]))
        kind.append(np.array([j]))
    return SurfaceAreaMeasure(np.concatenate(normals), np.concatenate(weights),
                              np.concatenate(kind), mesh)


def binned_distance(m1, m2, level=2):
    """Total-variation distance of two measures binned on icosphere Voronoi cells."""
    centers, _ = icosphere(level)

    def hist(m):
        cell = np.argmax(m.normals @ centers.T, axis=1)
        return np.bincount(cell, weights=m.weights, minlength=len(centers))

    return float(np.sum(np.abs(hist(m1) - hist(m2))))
