"""Convex polytopes given by support numbers over fixed facet normals.

``L(h) = {x : <x, u_i> <= h_i for all i}``.  With the origin in the
interior (all ``h_i > 0``) the intersection is computed by polar duality:
the convex hull of the points ``u_i / h_i`` has one facet per vertex of
``L(h)`` and one edge per edge of ``L(h)``.  Facet areas come from the
classical edge formula

    A_i = 1/2 sum_j l_ij (h_j - h_i cos t_ij) / sin t_ij

where ``l_ij`` is the length of the edge shared by facets ``i`` and ``j``
and ``t_ij`` the angle between their normals; the same edge data give the
Hessian of the volume (mixed areas).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .errors import GeometryError, PredicateError

__all__ = ["Polytope", "polytope_from_support", "facet_areas", "volume_gradient",
           "mixed_area_matrix", "steiner_point", "steiner_align", "translate", "write_off"]


@dataclass(frozen=True)
class Polytope:
    normals: np.ndarray
    h: np.ndarray
    areas: np.ndarray
    centroids: np.ndarray
    volume: float
    # dual-hull triangles (atom index triples) and the primal vertex of each
    simplices: np.ndarray = field(repr=False)
    simplex_points: np.ndarray = field(repr=False)
    # one row per primal edge: adjacent facets, the two dual simplices, length
    edge_facets: np.ndarray = field(repr=False)
    edge_simplices: np.ndarray = field(repr=False)
    edge_length: np.ndarray = field(repr=False)

    @property
    def scale(self):
        return float(np.max(np.abs(self.simplex_points)))

    @cached_property
    def _dedup(self):
        pts = self.simplex_points
        tol = 1e-9 * max(self.scale, 1e-300)
        pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
        n = len(pts)
        g = sp.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
        _, labels = connected_components(g, directed=False)
        # relabel in order of first appearance so indices are deterministic
        _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
        order = np.argsort(first)
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        ids = rank[inv]
        verts = pts[np.sort(first)]
        return verts, ids

    @property
    def vertices(self):
        """Distinct vertices (dual triangles of one primal vertex merged)."""
        return self._dedup[0]

    @property
    def simplex_vertex(self):
        return self._dedup[1]

    @cached_property
    def facet_vertex_sets(self):
        """For each atom, the sorted ids of the vertices on its facet."""
        ids = self.simplex_vertex
        n = len(self.h)
        fac = self.simplices.reshape(-1)
        vid = np.repeat(ids, 3)
        pairs = np.unique(np.stack([fac, vid], axis=1), axis=0)
        out = [np.zeros(0, dtype=np.int64)] * n
        if len(pairs):
            split = np.flatnonzero(np.diff(pairs[:, 0])) + 1
            for chunk in np.split(pairs, split):
                out[int(chunk[0, 0])] = chunk[:, 1]
        return out

    def facet_cycle(self, i):
        """Vertex ids of facet ``i`` ordered counter-clockwise about its normal."""
        ids = self.facet_vertex_sets[i]
        if len(ids) < 3 or self.areas[i] <= 0:
            return np.zeros(0, dtype=np.int64)
        pts = self.vertices[ids]
        u = self.normals[i]
        c = pts.mean(axis=0)
        e1 = pts[0] - c
        e1 -= np.dot(e1, u) * u
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(u, e1)
        ang = np.arctan2((pts - c) @ e2, (pts - c) @ e1)
        return ids[np.argsort(ang, kind="stable")]

    @property
    def nonempty(self):
        return self.areas > 1e-14 * max(1.0, float(np.sum(self.areas)))

    @cached_property
    def edges(self):
        """Distinct primal edges as sorted vertex-id pairs."""
        ids = self.simplex_vertex
        e = ids[self.edge_simplices]
        e = e[e[:, 0] != e[:, 1]]
        e.sort(axis=1)
        return np.unique(e, axis=0)

    @property
    def euler_characteristic(self):
        return len(self.vertices) - len(self.edges) + int(np.sum(self.nonempty))

    @property
    def closure_defect(self):
        return float(np.linalg.norm(self.areas @ self.normals))

    @property
    def steiner_point(self):
        return steiner_point(self)

    def support(self, u):
        """Support function ``max_v <v, u>`` of the vertex set."""
        return np.max(np.atleast_2d(u) @ self.vertices.T, axis=1)

    def convexity_violation(self):
        """Largest ``<v, u_i> - h_i`` over vertices and atoms (<= 0 when consistent)."""
        worst = -np.inf
        verts = self.vertices
        for start in range(0, len(self.h), 2048):
            sl = slice(start, start + 2048)
            worst = max(worst, float(np.max(self.normals[sl] @ verts.T - self.h[sl, None])))
        return worst


def polytope_from_support(normals, h, qhull_options="Qt"):
    """Build ``L(h)`` from unit ``normals`` and positive support numbers ``h``."""
    normals = np.asarray(normals, dtype=float)
    h = np.asarray(h, dtype=float)
    if normals.ndim != 2 or normals.shape[1] != 3 or len(normals) != len(h):
        raise ValueError("normals must be (N, 3) and h of length N")
    if len(h) < 4:
        raise GeometryError("need at least four normals for a bounded polytope")
    if not np.all(h > 0):
        raise GeometryError("support numbers must be positive (origin-interior gauge)")
    q = normals / h[:, None]
    try:
        hull = ConvexHull(q, qhull_options=qhull_options)
    except QhullError as exc:
        raise PredicateError(f"dual hull is degenerate: {exc}") from exc
    eq = hull.equations
    off = -eq[:, 3]
    if np.any(off <= 1e-12 * np.max(np.abs(q))):
        raise GeometryError("normals do not positively span R^3: intersection is unbounded")
    X = eq[:, :3] / off[:, None]
    simp = hull.simplices
    nb = hull.neighbors
    S = len(simp)
    s_idx = np.repeat(np.arange(S), 3)
    t_idx = nb.reshape(-1)
    k_idx = np.tile(np.arange(3), S)
    keep = s_idx < t_idx
    s_idx, t_idx, k_idx = s_idx[keep], t_idx[keep], k_idx[keep]
    rows = simp[s_idx]
    fi = rows[np.arange(len(rows)), (k_idx + 1) % 3]
    fj = rows[np.arange(len(rows)), (k_idx + 2) % 3]
    ell = np.linalg.norm(X[s_idx] - X[t_idx], axis=1)

    ui, uj = normals[fi], normals[fj]
    cos = np.einsum("ij,ij->i", ui, uj)
    sin = np.linalg.norm(np.cross(ui, uj), axis=1)
    if np.any(sin <= 1e-15):
        raise PredicateError("adjacent facets with parallel normals")
    dij = (h[fj] - h[fi] * cos) / sin
    dji = (h[fi] - h[fj] * cos) / sin
    n = len(h)
    a_ij = 0.5 * ell * dij
    a_ji = 0.5 * ell * dji
    areas = np.bincount(fi, weights=a_ij, minlength=n) + np.bincount(fj, weights=a_ji, minlength=n)
    # signed fan triangles (foot point h_i u_i, X_s, X_t) give the centroids
    foot = h[:, None] * normals
    mid = X[s_idx] + X[t_idx]
    ci = (foot[fi] + mid) / 3.0
    cj = (foot[fj] + mid) / 3.0
    mom = np.zeros((n, 3))
    for k in range(3):
        mom[:, k] = np.bincount(fi, weights=a_ij * ci[:, k], minlength=n) \
            + np.bincount(fj, weights=a_ji * cj[:, k], minlength=n)
    areas = np.where(areas > 0, areas, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        centroids = np.where(areas[:, None] > 0, mom / areas[:, None], foot)
    volume = float(np.dot(h, areas) / 3.0)
    return Polytope(normals, h, areas, centroids, volume, simp, X,
                    np.stack([fi, fj], axis=1), np.stack([s_idx, t_idx], axis=1), ell)


def facet_areas(P):
    """Per-atom facet areas (0 for atoms whose halfspace is redundant)."""
    return P.areas.copy()


def volume_gradient(normals, h):
    """Gradient of ``h -> Vol(L(h))``; equal to the facet areas."""
    return facet_areas(polytope_from_support(normals, h))


def mixed_area_matrix(P):
    """Sparse Hessian ``d A_i / d h_j`` of the volume.

    Off-diagonal entries are ``l_ij / sin t_ij``; the diagonal makes each
    row annihilate the translation modes.
    """
    fi, fj = P.edge_facets.T
    ui, uj = P.normals[fi], P.normals[fj]
    cos = np.einsum("ij,ij->i", ui, uj)
    sin = np.linalg.norm(np.cross(ui, uj), axis=1)
    w = P.edge_length / sin
    n = len(P.h)
    diag = -(np.bincount(fi, weights=w * cos, minlength=n)
             + np.bincount(fj, weights=w * cos, minlength=n))
    rows = np.concatenate([fi, fj, np.arange(n)])
    cols = np.concatenate([fj, fi, np.arange(n)])
    vals = np.concatenate([w, w, diag])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def steiner_point(P):
    """Area-weighted mean of facet centroids, ``sum A_i c_i / sum A_i``."""
    return (P.areas @ P.centroids) / np.sum(P.areas)


def translate(P, t):
    """Exact translation of ``P`` by ``t`` (support numbers ``h_i + <t, u_i>``)."""
    t = np.asarray(t, dtype=float)
    out = replace(P, h=P.h + P.normals @ t, centroids=P.centroids + t,
                  simplex_points=P.simplex_points + t)
    return out


def steiner_align(P):
    """Translate ``P`` so its Steiner point is the origin."""
    return translate(P, -steiner_point(P))


def write_off(P, path):
    """Write the non-empty facets of ``P`` as an OFF file."""
    verts = P.vertices
    cycles = [P.facet_cycle(i) for i in range(len(P.h)) if P.nonempty[i]]
    cycles = [c for c in cycles if len(c) >= 3]
    lines = ["OFF", f"{len(verts)} {len(cycles)} {len(P.edges)}"]
    lines += [" ".join(f"{x:.17g}" for x in v) for v in verts]
    lines += [" ".join([str(len(c))] + [str(int(k)) for k in c]) for c in cycles]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
