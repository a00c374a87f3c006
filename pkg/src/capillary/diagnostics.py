"""Verification of pipeline outputs and the JSON report.

All checks are read-only over a :class:`~capillary.pipeline.CapillaryOutput`
except :func:`verify_uniqueness` and :func:`refinement_table`, which run
the pipeline again.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.spatial import ConvexHull, cKDTree

from .errors import PreconditionError
from .measure import build_measure
from .mesh import triangulate_delta
from .minkowski import SolverOptions
from .sphere import check_balancing

__all__ = ["DiagnosticsReport", "build_report", "verify_convexity", "verify_mean_curvature",
           "hausdorff", "point_set_hausdorff", "verify_uniqueness", "verify_symmetry",
           "find_symmetries", "quadrature_moment_error", "refinement_table", "dumps"]

# faces whose normalized point mass is below this are flagged as nearly
# degenerate (the wetted disk collapses towards a round circle)
UNDULOID_THRESHOLD = 1e-6


# --------------------------------------------------------------------------
# deterministic JSON


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {_encode(v, indent, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return f"{x:.17g}"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with floats written to 17 significant digits (NaN as null)."""
    return _encode(obj, indent, 0) + "\n"


# --------------------------------------------------------------------------
# geometry checks


def _points(obj):
    if hasattr(obj, "composite_vertices"):
        return obj.composite_vertices()
    if hasattr(obj, "simplex_points"):
        return obj.vertices
    if hasattr(obj, "vertices"):
        return np.asarray(obj.vertices)
    return np.asarray(obj, dtype=float)


def verify_convexity(obj):
    """Largest depth of a vertex below the boundary of the convex hull of all vertices.

    Accepts a pipeline output (``Sigma`` plus disk boundaries), a polytope,
    a mesh or an ``(n, 3)`` array.  Zero for points in convex position.
    """
    X = _points(obj)
    hull = ConvexHull(X)
    eq = hull.equations
    worst = 0.0
    for start in range(0, len(X), 1024):
        val = X[start:start + 1024] @ eq[:, :3].T + eq[:, 3]
        worst = max(worst, float(np.max(-np.max(val, axis=1))))
    return max(worst, 0.0)


def _cotan_laplacian(V, T):
    a, b, c = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]

    def cot(p, q, r):          # angle at p
        u, v = q - p, r - p
        return np.einsum("ij,ij->i", u, v) / np.linalg.norm(np.cross(u, v), axis=1)

    ca, cb, cc = cot(a, b, c), cot(b, c, a), cot(c, a, b)
    rows = np.concatenate([T[:, 1], T[:, 2], T[:, 2], T[:, 0], T[:, 0], T[:, 1]])
    cols = np.concatenate([T[:, 2], T[:, 1], T[:, 0], T[:, 2], T[:, 1], T[:, 0]])
    vals = np.concatenate([ca, ca, cb, cb, cc, cc])
    n = len(V)
    W = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    area = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
    mass = np.zeros(n)
    for k in range(3):
        np.add.at(mass, T[:, k], area / 3.0)
    return W, mass


@dataclass
class MeanCurvatureStats:
    patch_radius_error: float       # max | |x - g| - r | / r
    cotan_mean: float
    cotan_median: float
    cotan_relative_error: float     # |mean - H| / H
    interior_vertices: int


def verify_mean_curvature(sigma, H):
    """Patch-radius identity and an independent cotangent-Laplacian estimate of ``H``.

    The estimate at vertex ``i`` is ``-<K_i, u_i> / 2`` with ``K`` the
    cotangent Laplacian of position; only vertices at least two rings away
    from the boundary loops enter the statistics.
    """
    r = sigma.radius
    dist = np.linalg.norm(sigma.vertices - sigma.generators, axis=1)
    radius_err = float(np.max(np.abs(dist - r)) / r)
    V, T = sigma.vertices, sigma.triangles
    W, mass = _cotan_laplacian(V, T)
    K = (W @ V - np.asarray(W.sum(axis=1)).ravel()[:, None] * V) / (2.0 * mass[:, None])
    Hi = -0.5 * np.einsum("ij,ij->i", K, sigma.normals)
    interior = np.ones(len(V), dtype=bool)
    bnd = sigma.boundary_vertices
    if len(bnd):
        ring = np.zeros(len(V), dtype=bool)
        ring[bnd] = True
        # grow the boundary by two rings through triangle adjacency
        for _ in range(2):
            hit = np.any(ring[T], axis=1)
            ring[T[hit].ravel()] = True
        interior = ~ring
    vals = Hi[interior]
    mean = float(np.mean(vals)) if len(vals) else float("nan")
    med = float(np.median(vals)) if len(vals) else float("nan")
    return MeanCurvatureStats(radius_err, mean, med, abs(mean - H) / H, int(interior.sum()))


def _closest_on_triangles(p, a, b, c):
    """Distances from points ``p[i]`` to triangles ``(a[i], b[i], c[i])``."""
    ab, ac, ap = b - a, c - a, p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4
    with np.errstate(divide="ignore", invalid="ignore"):
        t_ab = d1 / (d1 - d3)
        t_ac = d2 / (d2 - d6)
        t_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        den = va + vb + vc
        v = vb / den
        w = vc / den
    conds = [
        (d1 <= 0) & (d2 <= 0),
        (d3 >= 0) & (d4 <= d3),
        (vc <= 0) & (d1 >= 0) & (d3 <= 0),
        (d6 >= 0) & (d5 <= d6),
        (vb <= 0) & (d2 >= 0) & (d6 <= 0),
        (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0),
    ]
    choices = [a, b, a + t_ab[:, None] * ab, c, a + t_ac[:, None] * ac,
               b + t_bc[:, None] * (c - b)]
    q = a + v[:, None] * ab + w[:, None] * ac
    for cond, ch in zip(reversed(conds), reversed(choices)):
        q = np.where(cond[:, None], ch, q)
    return np.linalg.norm(p - q, axis=1)


def _one_sided(X, V, T, k=16):
    cen = V[T].mean(axis=1)
    k = min(k, len(T))
    _, cand = cKDTree(cen).query(X, k=k)
    cand = cand.reshape(len(X), k)
    best = np.full(len(X), np.inf)
    for j in range(k):
        t = T[cand[:, j]]
        d = _closest_on_triangles(X, V[t[:, 0]], V[t[:, 1]], V[t[:, 2]])
        best = np.minimum(best, d)
    return float(np.max(best))


def hausdorff(A, B, k=16):
    """Symmetric vertex-to-triangle Hausdorff distance between two triangle meshes.

    Each argument is a mesh with ``vertices`` and ``triangles`` or a
    ``(vertices, triangles)`` pair.  Candidate triangles are the ``k`` with
    nearest centroids.
    """
    VA, TA = (A.vertices, A.triangles) if hasattr(A, "triangles") else A
    VB, TB = (B.vertices, B.triangles) if hasattr(B, "triangles") else B
    return max(_one_sided(VA, VB, TB, k), _one_sided(VB, VA, TA, k))


def point_set_hausdorff(X, Y):
    """Symmetric Hausdorff distance between two finite point sets."""
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    return float(max(cKDTree(Y).query(X)[0].max(), cKDTree(X).query(Y)[0].max()))


# --------------------------------------------------------------------------
# symmetry and uniqueness


def _reflect_points(X, n):
    return X - 2.0 * np.outer(X @ n, n)


def face_permutation(config, normal, tol=1e-9):
    """Permutation ``perm`` with ``s(p_j) = p_perm[j]`` and equal data, or ``None``."""
    n = np.asarray(normal, float) / np.linalg.norm(normal)
    P = config.normals
    R = _reflect_points(P, n) if config.m else P
    perm = []
    for j in range(config.m):
        d = np.linalg.norm(P - R[j], axis=1)
        k = int(np.argmin(d))
        fj, fk = config.faces[j], config.faces[k]
        if d[k] > tol or abs(fj.theta - fk.theta) > tol or abs(fj.a - fk.a) > tol * max(1, fj.a):
            return None
        perm.append(k)
    return perm


def find_symmetries(config, limit=3):
    """Unit normals of mirror planes through the origin that leave ``config`` invariant."""
    cands = [np.eye(3)[k] for k in range(3)]
    P = config.normals
    for i in range(config.m):
        cands.append(P[i])
        for j in range(i + 1, config.m):
            cands += [P[i] - P[j], P[i] + P[j], np.cross(P[i], P[j])]
    out = []
    for c in cands:
        nrm = np.linalg.norm(c)
        if nrm < 1e-9:
            continue
        c = c / nrm
        if any(abs(abs(c @ o) - 1.0) < 1e-9 for o in out):
            continue
        if face_permutation(config, c) is not None:
            out.append(c)
        if len(out) >= limit:
            break
    return out


def verify_symmetry(output, normal, permutation=None):
    """``Hausdorff(s(Sigma), Sigma)`` for the mirror ``s`` through the aligned origin.

    Raises :class:`PreconditionError` if the configuration is not invariant
    under the mirror (with ``permutation`` if given).
    """
    n = np.asarray(normal, float) / np.linalg.norm(normal)
    perm = face_permutation(output.config, n)
    if perm is None or (permutation is not None and list(permutation) != perm):
        raise PreconditionError("configuration is not invariant under the given reflection")
    sig = output.sigma
    R = _reflect_points(sig.vertices, n)
    return hausdorff((R, sig.triangles[:, ::-1]), sig)


def verify_uniqueness(config, level, opts_a=None, opts_b=None):
    """Hausdorff distance between two independently started runs.

    The second run by default starts from a randomly stretched, scaled and
    translated body and uses a different backtracking factor.  Returns
    ``(distance, diameter)``.
    """
    from .pipeline import run
    opts_a = opts_a or SolverOptions()
    opts_b = opts_b or SolverOptions(perturb_seed=20240917, backtrack=0.8)
    a = run(config, level, opts_a, diagnostics=False)
    b = run(config, level, opts_b, diagnostics=False)
    return hausdorff(a.sigma, b.sigma), a.diameter


# --------------------------------------------------------------------------
# quadrature and refinement


def quadrature_moment_error(config, level):
    """``|sum_smooth f_i u_i + sum_j pi sin^2(theta_j) p_j|`` before closure."""
    mesh = triangulate_delta(config, level)
    m = build_measure(config, mesh)
    target = -np.pi * (np.sin(config.thetas) ** 2) @ config.normals if config.m else np.zeros(3)
    return float(np.linalg.norm(m.moment(m.smooth) - target))


def refinement_table(config, levels=(3, 4, 5), opts=None):
    """Residuals of full runs over a sequence of levels."""
    from .pipeline import run
    rows = []
    for lv in levels:
        out = run(config, lv, opts, diagnostics=False)
        rep = build_report(out, symmetry=False)
        rows.append({
            "level": lv,
            "vertices": rep.vertices,
            "area_identity_max": max(rep.area_identity) if rep.area_identity else 0.0,
            "contact_angle_max_deviation_deg": max(
                [c["max_deviation_deg"] for c in rep.contact_angles] or [0.0]),
            "solver_residual": rep.solver_residual,
            "raw_closure_defect": rep.raw_closure_defect,
            "quadrature_moment_error": quadrature_moment_error(config, lv),
            "energy": rep.energy,
        })
    return rows


# --------------------------------------------------------------------------
# report


@dataclass
class DiagnosticsReport:
    level: int
    faces: int
    H: float
    scale: float
    vertices: int
    triangles: int
    atoms: int
    balancing_residual: float
    raw_closure_defect: float
    closure_defect: float
    solver_residual: float
    solver_iterations: int
    contact_angles: list
    area_identity: list
    energy: float
    disks: list
    planes: list
    plane_containment: float
    convexity_violation: float
    boundary_gap: float
    diameter: float
    patch_radius_error: float
    cotan_mean_curvature: float
    cotan_relative_error: float
    flags: dict
    symmetry: list = field(default_factory=list)
    uniqueness: dict = None
    refinement: list = None

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return dumps(self.to_dict())

    def residuals_nonnegative(self):
        vals = [self.balancing_residual, self.raw_closure_defect, self.closure_defect,
                self.solver_residual, self.convexity_violation, self.boundary_gap,
                self.patch_radius_error] + list(self.area_identity)
        return all(v >= 0 for v in vals)


def build_report(output, symmetry=True):
    """Collect every check that needs no extra pipeline run."""
    from .pipeline import area_identity_check, boundary_gaps, compute_energy, contact_angles
    cfg = output.config
    sig = output.sigma
    ang = contact_angles(output)
    contact = [{"face": j, "target_deg": math.degrees(f.theta),
                "mean_deg": math.degrees(a[0]), "max_deviation_deg": math.degrees(a[1])}
               for j, (f, a) in enumerate(zip(cfg.faces, ang))]
    disks = [{"face": d.face, "area": d.area, "perimeter": d.perimeter,
              "vertices": len(d.polygon), "convex": d.is_convex(),
              "planarity": d.planarity()} for d in output.disks]
    planes = [{"face": p.face, "normal": [float(c) for c in p.normal], "support": p.support}
              for p in output.planes]
    contain = max([float(np.max(p.signed_distance(sig.vertices))) for p in output.planes]
                  or [0.0])
    gaps = boundary_gaps(output)
    mc = verify_mean_curvature(sig, cfg.H)
    P = output.polytope
    dirac = output.measure.dirac_index
    near = [j for j in range(cfg.m)
            if j in dirac and output.measure.weights[dirac[j]] < UNDULOID_THRESHOLD]
    flags = {
        "near_unduloid_faces": near,
        "experimental_theta_pi_faces": [j for j, f in enumerate(cfg.faces) if f.cap_radius == 0],
        "right_angle_face": None if output.cut_normal is None else next(
            j for j, f in enumerate(cfg.faces) if abs(f.theta - math.pi / 2) < 1e-12),
        "empty_facets": int(np.sum(~P.nonempty)),
    }
    sym = []
    if symmetry:
        for n in find_symmetries(cfg):
            sym.append({"normal": [float(c) for c in n],
                        "permutation": face_permutation(cfg, n),
                        "hausdorff": verify_symmetry(output, n)})
    info = output.solve_info
    return DiagnosticsReport(
        level=output.level, faces=cfg.m, H=cfg.H, scale=output.scale,
        vertices=len(sig.vertices), triangles=len(sig.triangles), atoms=len(output.measure),
        balancing_residual=float(np.linalg.norm(check_balancing(cfg))),
        raw_closure_defect=float(output.raw_closure_defect),
        closure_defect=output.measure.closure_defect / output.measure.total,
        solver_residual=float(info.residual) if info else float("nan"),
        solver_iterations=int(info.iterations) if info else 0,
        contact_angles=contact,
        area_identity=[float(x) for x in area_identity_check(output)],
        energy=compute_energy(output),
        disks=disks, planes=planes, plane_containment=contain,
        convexity_violation=verify_convexity(output),
        boundary_gap=max(gaps.values()) if gaps else 0.0,
        diameter=output.diameter,
        patch_radius_error=mc.patch_radius_error,
        cotan_mean_curvature=mc.cotan_mean,
        cotan_relative_error=mc.cotan_relative_error,
        flags=flags, symmetry=sym)
