"""Geodesic triangulations of the sphere minus the contact caps.

The base is an icosphere.  Caps are cut out by deleting the icosphere
vertices inside (or too close to) each cap and inserting equally spaced
vertices on its rim circle; the triangulation is then the spherical Delaunay
triangulation of the surviving points, which for points on the unit sphere
is their convex hull.  Hull facets spanned only by rim vertices of one cap
lie inside that cap and are dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .config import spherical_angle, unit
from .errors import ConfigError, GeometryError

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
# rim vertices push icosphere vertices closer than this many edge lengths away
RIM_MARGIN = 0.5


def icosahedron():
    v = []
    for s1 in (-1.0, 1.0):
        for s2 in (-1.0, 1.0):
            v += [(0.0, s1, s2 * GOLDEN), (s1, s2 * GOLDEN, 0.0), (s2 * GOLDEN, 0.0, s1)]
    v = unit(np.array(v))
    return v, _oriented(v, ConvexHull(v).simplices)


def icosphere(level):
    """Vertices and outward-oriented triangles of the level-``level`` icosphere.

    Level 0 is the icosahedron (12 vertices); each level splits every
    triangle in four, giving ``10 * 4**level + 2`` vertices.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    verts, tris = icosahedron()
    for _ in range(level):
        edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
        edges.sort(axis=1)
        uniq, inv = np.unique(edges, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        mid = unit(verts[uniq[:, 0]] + verts[uniq[:, 1]])
        nv = len(verts)
        verts = np.concatenate([verts, mid])
        t = len(tris)
        m01, m12, m20 = (inv[:t] + nv, inv[t:2 * t] + nv, inv[2 * t:] + nv)
        a, b, c = tris.T
        tris = np.concatenate([
            np.stack([a, m01, m20], axis=1),
            np.stack([b, m12, m01], axis=1),
            np.stack([c, m20, m12], axis=1),
            np.stack([m01, m12, m20], axis=1),
        ])
    return verts, tris


def mean_edge_length(level):
    """Mean chord length of icosphere edges at ``level`` (approximate, closed form)."""
    # area-equivalent equilateral triangle on 20 * 4**level faces
    n_tri = 20 * 4 ** level
    return math.sqrt(4.0 * math.pi / n_tri * 4.0 / math.sqrt(3.0))


def spherical_triangle_areas(verts, tris):
    """Spherical excess of each triangle (Van Oosterom - Strackee)."""
    a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    num = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) \
        + np.einsum("ij,ij->i", c, a)
    return 2.0 * np.arctan2(num, den)


def _oriented(verts, tris):
    tris = np.array(tris, dtype=np.int64)
    a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    flip = np.einsum("ij,ij->i", a, np.cross(b, c)) < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


def frame(p):
    """Right-handed orthonormal ``(e1, e2)`` with ``e1 x e2 = p``."""
    p = unit(p)
    ref = np.array([1.0, 0.0, 0.0])
    if abs(p[0]) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    e1 = unit(ref - np.dot(ref, p) * p)
    e2 = np.cross(p, e1)
    return e1, e2


def circle_points(p, rho, n):
    """``n`` equally spaced points at angular distance ``rho`` from ``p``, CCW about ``p``."""
    e1, e2 = frame(p)
    phi = 2.0 * math.pi * np.arange(n) / n
    ring = np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2
    pts = math.cos(rho) * np.asarray(p, dtype=float) + math.sin(rho) * ring
    return unit(pts)


@dataclass(frozen=True)
class SphericalMesh:
    """Triangulated region of the unit sphere.

    ``loops[j]`` lists, counter-clockwise about ``p_j``, the vertices on the
    rim of cap ``j``; ``vertex_face[i]`` is ``j`` for those vertices and -1
    otherwise.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    loops: dict = field(default_factory=dict)
    vertex_face: np.ndarray = None
    level: int = 0
    resolution: float = 0.0

    @property
    def triangle_areas(self):
        return spherical_triangle_areas(self.vertices, self.triangles)

    @property
    def area(self):
        return float(np.sum(self.triangle_areas))

    def vertex_areas(self, density=None):
        """Lumped weights: one third of each incident triangle's (weighted) area."""
        ta = self.triangle_areas
        if density is not None:
            ta = ta * density
        w = np.zeros(len(self.vertices))
        for k in range(3):
            np.add.at(w, self.triangles[:, k], ta / 3.0)
        return w

    @property
    def boundary_vertices(self):
        if not self.loops:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.asarray(v) for v in self.loops.values()])


def _delaunay_with_rims(level, rims, min_points=6):
    """Spherical Delaunay of the icosphere points with rim circles inserted.

    ``rims`` is a list of ``(p, rho, cut)``; icosphere points within
    ``RIM_MARGIN`` edge lengths of a rim are removed, and so are points inside
    a rim when ``cut`` is true.  Returns vertices, oriented triangles, the rim
    index of each vertex (-1 if none), and the rim vertex ranges.
    """
    base, _ = icosphere(level)
    h = mean_edge_length(level)
    keep = np.ones(len(base), dtype=bool)
    for p, rho, cut in rims:
        ang = spherical_angle(base, p)
        near = np.abs(ang - rho) < RIM_MARGIN * h
        if cut:
            near |= ang < rho
        keep &= ~near
    pts = [base[keep]]
    tags = [np.full(int(keep.sum()), -1)]
    ranges = []
    start = int(keep.sum())
    for k, (p, rho, cut) in enumerate(rims):
        if rho <= 0:
            ranges.append(np.zeros(0, dtype=np.int64))
            continue
        n = max(min_points, int(math.ceil(2.0 * math.pi * math.sin(rho) / h)))
        pts.append(circle_points(p, rho, n))
        tags.append(np.full(n, k))
        ranges.append(np.arange(start, start + n))
        start += n
    verts = np.concatenate(pts)
    tag = np.concatenate(tags)
    if len(verts) < 4:
        raise ConfigError("caps cover the whole sphere at this level")
    hull = ConvexHull(verts)
    tris = _oriented(verts, hull.simplices)
    if len(hull.vertices) != len(verts):
        raise GeometryError("spherical Delaunay lost vertices (coincident points)")
    return verts, tris, tag, ranges, h


def _contains(verts, tris, q):
    a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    s1 = np.einsum("ij,j->i", np.cross(a, b), q)
    s2 = np.einsum("ij,j->i", np.cross(b, c), q)
    s3 = np.einsum("ij,j->i", np.cross(c, a), q)
    return (s1 >= 0) & (s2 >= 0) & (s3 >= 0)


def triangulate_delta(config, level):
    """Triangulate ``S^2`` minus the open contact caps of ``config``.

    Cap ``j`` has angular radius ``pi - theta_j`` about ``p_j``.  The rim of
    each cap carries about ``2 pi sin(theta_j) / h`` vertices, ``h`` being the
    icosphere edge length, so rim and interior resolution agree.  Raises
    :class:`ConfigError` for configurations that violate the hypotheses
    (for example overlapping caps).
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    config.check()
    rims = [(f.p, f.cap_radius, True) for f in config.faces]
    verts, tris, tag, ranges, h = _delaunay_with_rims(level, rims)
    drop = np.zeros(len(tris), dtype=bool)
    t0 = tag[tris]
    same = (t0[:, 0] >= 0) & (t0[:, 0] == t0[:, 1]) & (t0[:, 1] == t0[:, 2])
    drop |= same
    loops = {}
    for j, f in enumerate(config.faces):
        if f.cap_radius > 0:
            loops[j] = ranges[j]
            continue
        # point cap (theta = pi): remove the triangle containing p_j
        hit = np.flatnonzero(_contains(verts, tris, f.p) & ~drop)
        if len(hit) == 0:
            raise GeometryError(f"no triangle contains p_{j}")
        t = hit[0]
        drop[t] = True
        loops[j] = tris[t].copy()
    tris = tris[~drop]
    if len(tris) == 0:
        raise ConfigError("caps cover the whole sphere")
    vertex_face = tag.copy()
    for j, loop in loops.items():
        vertex_face[loop] = j
    mesh = SphericalMesh(verts, tris, loops, vertex_face, level, h)
    if np.any(mesh.triangle_areas <= 0):
        raise GeometryError("degenerate spherical triangle in cap triangulation")
    return mesh
