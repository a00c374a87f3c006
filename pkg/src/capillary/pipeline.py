"""End-to-end construction of the capillary surface.

Stages: triangulate the admissible normals ``Delta`` -> discrete surface-area
measure -> closure -> Minkowski solve (polytope ``L``) -> parallel surface
``Sigma`` at distance ``1/(2H)`` -> container planes -> wetted disks.

Everything is computed at ``H = 1/2`` (offset distance 1) and scaled by
``1/(2H)`` on output.  Positions are reported in the Steiner gauge of ``L``.

A face with contact angle ``pi/2`` is handled by reflecting the other faces
through the plane orthogonal to its normal, solving the doubled problem and
keeping the half on the side opposite to that normal.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .config import ANGLE_TOL, CapillaryConfig, Face, spherical_angle
from .errors import (ConfigError, DegeneracyError, GeometryError, PreconditionError,
                     StageError)
from .measure import build_measure, close_measure
from .mesh import SphericalMesh, frame, triangulate_delta
from .minkowski import SolverOptions, solve_minkowski
from .sphere import balancing_tolerance, check_balancing

logger = logging.getLogger(__name__)

# relative tolerance for support-function ties (times the polytope scale)
TIE_TOL = 1e-11


# --------------------------------------------------------------------------
# output types


@dataclass(frozen=True)
class TriangleMesh:
    """Triangulated surface with per-vertex Gauss image.

    ``generators[i]`` is the point of the generating polytope with
    ``vertices[i] = generators[i] + r * normals[i]``; ``generator_index[i]`` is
    its polytope vertex id, or -1 when the generator is not a polytope vertex
    (the centroid of a tied support set, or a symmetric point along a
    right-angle cut).
    """

    vertices: np.ndarray
    normals: np.ndarray
    triangles: np.ndarray
    generators: np.ndarray
    generator_index: np.ndarray
    radius: float
    loops: dict = field(default_factory=dict)

    @property
    def triangle_areas(self):
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    @property
    def area(self):
        return float(np.sum(self.triangle_areas))

    @property
    def boundary_vertices(self):
        if not self.loops:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.asarray(v) for v in self.loops.values()])

    @property
    def diameter(self):
        v = self.vertices
        return float(np.max(np.linalg.norm(v - v.mean(axis=0), axis=1)) * 2.0)

    def scaled(self, s):
        return TriangleMesh(self.vertices * s, self.normals, self.triangles,
                            self.generators * s, self.generator_index, self.radius * s,
                            self.loops)

    def translated(self, t):
        t = np.asarray(t, dtype=float)
        return TriangleMesh(self.vertices + t, self.normals, self.triangles,
                            self.generators + t, self.generator_index, self.radius,
                            self.loops)


@dataclass(frozen=True)
class ContainerPlane:
    """Plane ``<x, normal> = support`` bounding the container on face ``face``."""

    normal: np.ndarray
    support: float
    face: int

    def signed_distance(self, x):
        return np.atleast_2d(x) @ self.normal - self.support


@dataclass(frozen=True)
class WettedDisk:
    """Planar convex polygon ``polygon`` (counter-clockwise about ``normal``)."""

    face: int
    polygon: np.ndarray
    normal: np.ndarray

    @property
    def area(self):
        p = self.polygon
        c = p.mean(axis=0)
        cr = np.cross(p - c, np.roll(p, -1, axis=0) - c)
        return float(0.5 * np.sum(cr @ self.normal))

    @property
    def perimeter(self):
        p = self.polygon
        return float(np.sum(np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)))

    @property
    def centroid(self):
        return self.polygon.mean(axis=0)

    def planarity(self):
        """Largest deviation of a vertex from the mean plane along ``normal``."""
        d = self.polygon @ self.normal
        return float(np.max(np.abs(d - d.mean())))

    def turn_signs(self):
        p = self.polygon
        e0 = np.roll(p, -1, axis=0) - p
        e1 = np.roll(e0, -1, axis=0)
        return np.cross(e0, e1) @ self.normal

    def is_convex(self, tol=1e-12):
        t = self.turn_signs()
        scale = self.perimeter ** 2
        return bool(np.all(t >= -tol * scale))


@dataclass
class CapillaryOutput:
    config: CapillaryConfig
    level: int
    scale: float
    sigma: TriangleMesh
    planes: list
    disks: list
    polytope: object
    measure: object
    sphere_mesh: SphericalMesh
    solve_info: object = None
    cut_normal: np.ndarray = None
    doubled_config: CapillaryConfig = None
    timings: dict = field(default_factory=dict)
    # relative moment defect of the measure before closure
    raw_closure_defect: float = 0.0
    report: object = None

    @property
    def m(self):
        return self.config.m

    def composite_vertices(self):
        """Vertices of ``Sigma`` together with all wetted-disk boundaries."""
        return np.concatenate([self.sigma.vertices] + [d.polygon for d in self.disks])

    @property
    def diameter(self):
        v = self.composite_vertices()
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2))) \
            if len(v) < 2000 else _diameter(v)


def _diameter(v):
    hull = ConvexHull(v)
    w = v[hull.vertices]
    best = 0.0
    for start in range(0, len(w), 1024):
        d = np.linalg.norm(w[start:start + 1024, None, :] - w[None, :, :], axis=2)
        best = max(best, float(d.max()))
    return best


# --------------------------------------------------------------------------
# support points and the parallel surface


def support_points(P, dirs, prefer=None, tol=TIE_TOL):
    """Index of a maximizer of ``<v, u>`` over polytope vertices, per direction.

    Ties within ``tol * scale`` go to the lowest vertex index; if ``prefer``
    (boolean mask over vertices) meets the tie set, the lowest preferred
    index is taken instead.
    """
    V = P.vertices
    dirs = np.atleast_2d(dirs)
    out = np.empty(len(dirs), dtype=np.int64)
    thr = tol * max(P.scale, 1e-300)
    for start in range(0, len(dirs), 2048):
        sl = slice(start, start + 2048)
        M = dirs[sl] @ V.T
        cand = M >= M.max(axis=1, keepdims=True) - thr
        idx = np.argmax(cand, axis=1)
        if prefer is not None:
            both = cand & prefer[None, :]
            has = both.any(axis=1)
            idx = np.where(has, np.argmax(both, axis=1), idx)
        out[sl] = idx
    return out


def support_generators(P, dirs, prefer=None, tol=TIE_TOL):
    """Canonical support point of ``P`` per direction.

    When several vertices tie (the direction is normal to an edge or a
    facet) the centroid of the tied vertices is returned; it lies in the
    support set, and unlike a pick by index it does not depend on how the
    hull happened to number its vertices.  ``prefer`` restricts the tie set
    when the two meet.  Returns ``(points, index)`` with index -1 for
    centroids.
    """
    V = P.vertices
    dirs = np.atleast_2d(dirs)
    pts = np.empty((len(dirs), 3))
    idx = np.empty(len(dirs), dtype=np.int64)
    thr = tol * max(P.scale, 1e-300)
    for start in range(0, len(dirs), 2048):
        sl = slice(start, start + 2048)
        M = dirs[sl] @ V.T
        cand = M >= M.max(axis=1, keepdims=True) - thr
        if prefer is not None:
            both = cand & prefer[None, :]
            cand = np.where(both.any(axis=1, keepdims=True), both, cand)
        count = cand.sum(axis=1)
        pts[sl] = (cand @ V) / count[:, None]
        idx[sl] = np.where(count == 1, np.argmax(cand, axis=1), -1)
    return pts, idx


def parallel_surface(P, mesh, r, boundary_facets=None, symmetric_loops=None):
    """Outer parallel surface ``u -> s_P(u) + r u`` over a spherical mesh.

    Parameters
    ----------
    P : Polytope
    mesh : SphericalMesh
        Its vertices are the Gauss images of the output vertices.
    r : float
        Offset distance.
    boundary_facets : dict, optional
        ``face j -> atom index`` of the facet whose vertices are preferred on
        loop ``j``; this puts the loop exactly on the wetted-disk boundary.
    symmetric_loops : dict, optional
        ``face j -> unit normal p`` for loops lying on the symmetry plane of
        ``P``: the generator is the projection of the support vertex onto
        ``<x, p> = 0``, which is a support point by symmetry.
    """
    if r <= 0:
        raise ValueError("offset distance must be positive")
    U = mesh.vertices
    nv = len(P.vertices)
    gen, gidx = support_generators(P, U)
    for j, atom in (boundary_facets or {}).items():
        loop = mesh.loops.get(j)
        if loop is None or len(loop) == 0:
            continue
        loop = np.asarray(loop)
        on_facet = np.zeros(nv, dtype=bool)
        on_facet[P.facet_vertex_sets[atom]] = True
        gen[loop], gidx[loop] = support_generators(P, U[loop], on_facet)
    for j, p in (symmetric_loops or {}).items():
        loop = np.asarray(mesh.loops[j])
        g = gen[loop]
        gen[loop] = g - np.outer(g @ p, p)
        gidx[loop] = -1
    X = gen + r * U
    return TriangleMesh(X, U.copy(), mesh.triangles.copy(), gen, gidx, float(r),
                        {j: np.asarray(v) for j, v in mesh.loops.items()})


# --------------------------------------------------------------------------
# planes and disks


def container_planes(P, config, dirac_atoms, scale=None):
    """Planes ``<x, p_j> = h_j + |cos theta_j|``, scaled by ``1/(2H)``.

    ``dirac_atoms`` maps face index to the atom index of its point mass in
    ``P``.  Raises :class:`DegeneracyError` if a Dirac facet is empty.
    """
    s = config.scale if scale is None else scale
    planes = []
    for j, f in enumerate(config.faces):
        atom = dirac_atoms[j]
        if not P.nonempty[atom]:
            raise DegeneracyError(f"facet of face {j} is empty")
        rstar = math.sqrt(max(0.0, 1.0 - math.sin(f.theta) ** 2))
        planes.append(ContainerPlane(f.p.copy(), float((P.h[atom] + rstar) * s), j))
    return planes


def _plane_basis(p):
    e1, e2 = frame(p)
    return np.stack([e1, e2])


def offset_polygon(O, normal, r, step, extra=None, tol=1e-9):
    """Outer parallel polygon of a convex planar polygon.

    ``O`` is ordered counter-clockwise about ``normal``.  Edges are pushed out
    by ``r``; at each corner the arc between the adjacent edge normals is
    sampled at angular spacing at most ``step``, and also at the directions
    in ``extra`` (pairs ``(corner point, in-plane unit direction)``) whose
    corner matches a vertex of ``O``.
    """
    O = np.asarray(O, dtype=float)
    normal = np.asarray(normal, dtype=float)
    k = len(O)
    if r == 0:
        return O.copy()
    if k == 1:
        e1, e2 = frame(normal)
        n = max(8, int(math.ceil(2.0 * math.pi / step)))
        phi = 2.0 * math.pi * np.arange(n) / n
        dirs = np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2
        return O[0] + r * dirs
    edges = np.roll(O, -1, axis=0) - O
    en = np.cross(edges, normal)
    en /= np.linalg.norm(en, axis=1, keepdims=True)
    scale = max(float(np.max(np.abs(O))), 1.0)
    extra_at = [[] for _ in range(k)]
    if extra:
        pts = np.array([e[0] for e in extra])
        dirs = np.array([e[1] for e in extra])
        d = np.linalg.norm(pts[:, None, :] - O[None, :, :], axis=2)
        near = np.argmin(d, axis=1)
        for i in np.flatnonzero(d[np.arange(len(pts)), near] <= tol * scale):
            extra_at[near[i]].append(dirs[i])
    out = []
    for i in range(k):
        n0, n1 = en[i - 1], en[i]
        b = np.cross(normal, n0)
        total = math.atan2(float(n1 @ b), float(n1 @ n0))
        if total < 0:
            total += 2.0 * math.pi
        nseg = max(1, int(math.ceil(total / step))) if total > 1e-15 else 1
        angles = list(np.linspace(0.0, total, nseg + 1)) if total > 1e-15 else [0.0]
        for w in extra_at[i]:
            a = math.atan2(float(w @ b), float(w @ n0))
            if a < 0:
                a += 2.0 * math.pi
            if 0.0 < a < total:
                angles.append(a)
        angles = np.unique(np.round(np.array(angles), 15))
        # merge near-duplicates so no zero-length edges appear
        keep = np.concatenate([[True], np.diff(angles) > 1e-12])
        angles = angles[keep]
        dirs = np.cos(angles)[:, None] * n0 + np.sin(angles)[:, None] * b
        out.append(O[i] + r * dirs)
    poly = np.concatenate(out)
    # consecutive corners share no points unless an edge has zero length
    d = np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1)
    return poly[d > 1e-14 * scale]


def parallel_disk(P, face_index, face, atom, step, extra=None, scale=1.0):
    """Wetted disk of face ``face_index``: facet polygon lifted and offset.

    The facet ``O_j`` of the Dirac atom is translated by ``|cos theta| p`` into
    the container plane and offset in-plane by ``sin theta``.
    """
    cyc = P.facet_cycle(atom)
    if len(cyc) < 3:
        raise DegeneracyError(f"facet of face {face_index} has fewer than 3 vertices")
    p = face.p
    rstar = abs(math.cos(face.theta))
    O = P.vertices[cyc] + rstar * p
    if extra:
        extra = [(g + rstar * p, w) for g, w in extra]
    poly = offset_polygon(O, p, math.sin(face.theta), step, extra)
    return WettedDisk(face_index, poly * scale, p.copy())


def cross_section(P, p, offset=0.0):
    """Convex polygon ``P cap {<x, p> = offset}``, counter-clockwise about ``p``."""
    V = P.vertices
    s = V @ p - offset
    tol = 1e-12 * max(P.scale, 1e-300)
    pts = [V[np.abs(s) <= tol]]
    e = P.edges
    sa, sb = s[e[:, 0]], s[e[:, 1]]
    cross = ((sa < -tol) & (sb > tol)) | ((sa > tol) & (sb < -tol))
    a, b = V[e[cross, 0]], V[e[cross, 1]]
    t = sa[cross] / (sa[cross] - sb[cross])
    pts.append(a + t[:, None] * (b - a))
    pts = np.concatenate(pts)
    pts = pts - np.outer(pts @ p - offset, p)
    B = _plane_basis(p)
    q = pts @ B.T
    if len(q) < 3:
        raise DegeneracyError("cross-section has fewer than 3 points")
    hull = ConvexHull(q)
    ring = pts[hull.vertices]        # 2-D hulls are returned counter-clockwise
    return ring


# --------------------------------------------------------------------------
# identities and measured quantities


def area_identity_check(output, config=None):
    """Per-face ``|A(D) - L(dD) r + pi r^2 - a_j| / a_j`` with ``r = sin(theta_j)/(2H)``."""
    config = config or output.config
    res = np.zeros(config.m)
    for d in output.disks:
        f = config.faces[d.face]
        r = math.sin(f.theta) / (2.0 * config.H)
        val = d.area - d.perimeter * r + math.pi * r * r
        res[d.face] = abs(val - f.a) / f.a
    return res


def compute_energy(output, config=None):
    """``Area(Sigma) - sum_j cos(theta_j) Area(D_j)``."""
    config = config or output.config
    e = output.sigma.area
    for d in output.disks:
        e -= math.cos(config.faces[d.face].theta) * d.area
    return float(e)


def contact_angles(output, config=None):
    """Per-face ``(mean, max |deviation|)`` in radians of ``pi - arccos<u, p_j>``."""
    config = config or output.config
    stats = []
    for j, f in enumerate(config.faces):
        loop = output.sigma.loops.get(j)
        if loop is None or len(loop) == 0:
            stats.append((float("nan"), float("nan")))
            continue
        u = output.sigma.normals[np.asarray(loop)]
        ang = math.pi - np.arccos(np.clip(u @ f.p, -1.0, 1.0))
        stats.append((float(ang.mean()), float(np.max(np.abs(ang - f.theta)))))
    return stats


def boundary_gaps(output):
    """Largest distance from a ``Sigma`` loop vertex to its disk boundary polygon."""
    gaps = {}
    for d in output.disks:
        loop = output.sigma.loops.get(d.face)
        if loop is None or len(loop) == 0:
            continue
        x = output.sigma.vertices[np.asarray(loop)]
        gaps[d.face] = float(np.max(_point_polyline_distance(x, d.polygon)))
    return gaps


def _point_polyline_distance(x, poly):
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    best = np.full(len(x), np.inf)
    for start in range(0, len(x), 512):
        xs = x[start:start + 512]
        ap = xs[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("ijk,jk->ij", ap, ab) / np.einsum("jk,jk->j", ab, ab), 0.0, 1.0)
        d = np.linalg.norm(ap - t[:, :, None] * ab[None, :, :], axis=2)
        best[start:start + 512] = d.min(axis=1)
    return best


# --------------------------------------------------------------------------
# right-angle faces


def right_angle_faces(config):
    return [j for j, f in enumerate(config.faces) if abs(f.theta - math.pi / 2) <= ANGLE_TOL]


def reflect(x, p):
    """Reflection through the plane through the origin orthogonal to ``p``."""
    x = np.asarray(x, dtype=float)
    return x - 2.0 * np.multiply.outer(x @ p, p) if x.ndim > 1 else x - 2.0 * (x @ p) * p


def reflect_double(config):
    """Doubled configuration for a single right-angle face.

    Returns ``(doubled, p_m, index_map)``: ``doubled`` holds the other faces
    followed by their mirror images through ``<x, p_m> = 0``, and
    ``index_map[j]`` is the position of original face ``j`` in ``doubled``.
    """
    rights = right_angle_faces(config)
    if len(rights) != 1:
        raise ConfigError(f"need exactly one right-angle face, found {len(rights)}")
    m = rights[0]
    pm = config.faces[m].p
    others = [j for j in range(config.m) if j != m]
    for j in others:
        f = config.faces[j]
        # the closed cap must stay in the open hemisphere opposite p_m
        if spherical_angle(f.p, pm) - f.cap_radius <= math.pi / 2 + ANGLE_TOL:
            raise ConfigError(f"cap of face {j} meets the closed hemisphere about the "
                              f"right-angle normal")
    faces = [config.faces[j] for j in others]
    faces += [Face(reflect(config.faces[j].p, pm), config.faces[j].theta, config.faces[j].a)
              for j in others]
    doubled = CapillaryConfig(config.H, tuple(faces), allow_theta_pi=config.allow_theta_pi)
    return doubled, pm.copy(), {j: k for k, j in enumerate(others)}


# --------------------------------------------------------------------------
# the pipeline


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _require_balanced(config):
    res = check_balancing(config)
    tol = balancing_tolerance(config)
    if np.linalg.norm(res) > tol:
        raise PreconditionError(f"configuration is not balanced: residual "
                                f"{np.linalg.norm(res):.3g} > {tol:.3g}")


def _solve(config, level, opts, timings):
    t0 = time.perf_counter()
    mesh = _stage("triangulate", triangulate_delta, config, level)
    t1 = time.perf_counter()
    measure = _stage("measure", build_measure, config, mesh)
    timings["raw_closure_defect"] = measure.closure_defect / measure.total
    measure = _stage("close", close_measure, measure)
    t2 = time.perf_counter()
    _, P, info = _stage("solve", solve_minkowski, measure, opts, return_info=True)
    t3 = time.perf_counter()
    timings.update(triangulate=t1 - t0, measure=t2 - t1, solve=t3 - t2)
    return mesh, measure, P, info


def _loop_extra(sigma, loop, p):
    """(generator, in-plane direction) pairs of a loop, for disk arc sampling."""
    loop = np.asarray(loop)
    u = sigma.normals[loop]
    w = u - np.outer(u @ p, p)
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    return list(zip(sigma.generators[loop], w))


def run(config, level=4, opts=None, diagnostics=True):
    """Build the capillary surface for ``config`` at icosphere ``level``.

    Raises :class:`StageError` naming the failing stage; the original
    exception is its ``cause``.
    """
    if not 0 <= level <= 7:
        raise ValueError("level must lie in [0, 7]")
    opts = opts or SolverOptions()
    _stage("validate", config.check)
    _stage("validate", _require_balanced, config)
    if right_angle_faces(config):
        out = _run_right_angle(config, level, opts)
    else:
        out = _run_plain(config, level, opts)
    if diagnostics:
        from .diagnostics import build_report
        out.report = _stage("diagnostics", build_report, out)
    return out


def _run_plain(config, level, opts):
    timings = {}
    start = time.perf_counter()
    mesh, measure, P, info = _solve(config, level, opts, timings)
    dirac = measure.dirac_index
    s = config.scale
    t0 = time.perf_counter()
    sigma = _stage("surface", parallel_surface, P, mesh, 1.0, dirac)
    planes = _stage("planes", container_planes, P, config, dirac)
    disks = []
    for j, f in enumerate(config.faces):
        extra = _loop_extra(sigma, mesh.loops[j], f.p)
        disks.append(_stage("disks", parallel_disk, P, j, f, dirac[j], mesh.resolution,
                            extra, s))
    timings["surface"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - start
    raw = timings.pop("raw_closure_defect")
    return CapillaryOutput(config, level, s, sigma.scaled(s), planes, disks, P, measure,
                           mesh, info, timings=timings, raw_closure_defect=raw)


def _run_right_angle(config, level, opts):
    timings = {}
    start = time.perf_counter()
    doubled, pm, index = _stage("reflect", reflect_double, config)
    m = right_angle_faces(config)[0]
    _, dmeasure, P, info = _solve(doubled, level, opts, timings)
    # the doubled body is symmetric; remove the rounding-level offset of its
    # Steiner point from the symmetry plane
    from .polytope import translate
    P = translate(P, -float(P.steiner_point @ pm) * pm)
    ddirac = dmeasure.dirac_index
    dirac = {j: ddirac[k] for j, k in index.items()}
    s = config.scale
    t0 = time.perf_counter()
    mesh = _stage("triangulate", triangulate_delta, config, level)
    sigma = _stage("surface", parallel_surface, P, mesh, 1.0, dirac, {m: pm})
    planes, disks = [], []
    for j, f in enumerate(config.faces):
        extra = _loop_extra(sigma, mesh.loops[j], f.p)
        if j == m:
            planes.append(ContainerPlane(pm.copy(), 0.0, j))
            O = _stage("disks", cross_section, P, pm)
            poly = offset_polygon(O, pm, 1.0, mesh.resolution, extra)
            disks.append(WettedDisk(j, poly * s, pm.copy()))
            continue
        rstar = abs(math.cos(f.theta))
        planes.append(ContainerPlane(f.p.copy(), float((P.h[dirac[j]] + rstar) * s), j))
        disks.append(_stage("disks", parallel_disk, P, j, f, dirac[j], mesh.resolution,
                            extra, s))
    timings["surface"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - start
    raw = timings.pop("raw_closure_defect")
    return CapillaryOutput(config, level, s, sigma.scaled(s), planes, disks, P, dmeasure,
                           mesh, info, cut_normal=pm, doubled_config=doubled, timings=timings,
                           raw_closure_defect=raw)


# --------------------------------------------------------------------------
# export


def _fmt(x):
    return f"{float(x):.17g}"


def write_obj(path, objects):
    """Write ``[(name, vertices, normals or None, triangles), ...]`` as OBJ text."""
    lines = []
    base = 1
    for name, verts, normals, tris in objects:
        lines.append(f"o {name}")
        lines += ["v " + " ".join(_fmt(c) for c in v) for v in verts]
        if normals is not None:
            lines += ["vn " + " ".join(_fmt(c) for c in n) for n in normals]
            lines += ["f " + " ".join(f"{i + base}//{i + base}" for i in t) for t in tris]
        else:
            lines += ["f " + " ".join(str(i + base) for i in t) for t in tris]
        base += len(verts)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_obj(path):
    """Read an OBJ written by :func:`write_obj`: ``{name: (vertices, normals, triangles)}``."""
    objs = {}
    name, verts, normals, tris = None, [], [], []
    offset = 0

    def flush():
        if name is not None:
            objs[name] = (np.array(verts, float).reshape(-1, 3),
                          np.array(normals, float).reshape(-1, 3) if normals else None,
                          np.array(tris, dtype=np.int64).reshape(-1, 3) - offset)

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "o":
                flush()
                offset += len(verts)
                name, verts, normals, tris = parts[1], [], [], []
            elif parts[0] == "v":
                verts.append([float(c) for c in parts[1:4]])
            elif parts[0] == "vn":
                normals.append([float(c) for c in parts[1:4]])
            elif parts[0] == "f":
                tris.append([int(c.split("/")[0]) - 1 for c in parts[1:4]])
    flush()
    return objs


def disk_triangles(disk):
    """Fan triangulation of a disk about its vertex mean (centre appended last)."""
    n = len(disk.polygon)
    verts = np.concatenate([disk.polygon, disk.centroid[None, :]])
    tris = np.stack([np.full(n, n), np.arange(n), (np.arange(n) + 1) % n], axis=1)
    return verts, tris


def export_obj(output, sigma_path, disks_path):
    write_obj(sigma_path, [("sigma", output.sigma.vertices, output.sigma.normals,
                            output.sigma.triangles)])
    objs = []
    for d in output.disks:
        v, t = disk_triangles(d)
        objs.append((f"disk_{d.face}", v, np.tile(d.normal, (len(v), 1)), t))
    write_obj(disks_path, objs)


def planes_dict(output):
    return [{"face": p.face, "normal": [float(c) for c in p.normal],
             "support": float(p.support)} for p in output.planes]
