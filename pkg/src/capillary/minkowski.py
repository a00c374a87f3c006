"""Discrete Minkowski problem: find the polytope with prescribed facet areas.

Given closed atoms ``(u_i, f_i)`` (``sum f_i u_i = 0``, ``f_i > 0``), the
support vector is found by minimizing the convex function

    Psi(h) = sum_i f_i h_i - c log Vol(L(h))

over ``h``; ``log Vol`` is concave by Brunn-Minkowski, ``Psi`` is invariant
under translations (which act as ``h -> h + U t``) and its critical points
satisfy ``A(h) = (Vol/c) f``.  A final scaling by ``sqrt(c / Vol)`` makes the
facet areas equal to ``f``.  This is the same critical point as minimizing
``sum f_i h_i`` under ``Vol >= 1``.

Newton steps use the exact Hessian ``-(c/V) DA + (c/V^2) A A^T`` with ``DA``
the sparse mixed-area matrix; the rank-one term is handled by
Sherman-Morrison and the translation kernel is projected out.  Steps are
damped so that no facet shrinks below half the smallest starting (or
target) normalized area while the normalized area residual decreases, in
the spirit of damped Newton methods for semi-discrete transport.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, GeometryError, PreconditionError
from .polytope import (mixed_area_matrix, polytope_from_support, steiner_align, steiner_point,
                       translate)

logger = logging.getLogger(__name__)

# give up when the best residual has not halved over this many iterations
STALL_WINDOW = 25


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 200
    area_tolerance: float = 1e-11
    backtrack: float = 0.5
    regularization: float = 1e-9
    h0: np.ndarray = None
    recenter: bool = True
    # when set, the start is randomly stretched, scaled and translated;
    # used to test independence of the start
    perturb_seed: int = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.area_tolerance > 0 and self.regularization > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.backtrack < 1):
            raise ValueError("backtrack factor must lie in (0, 1)")


@dataclass(frozen=True)
class SupportVector:
    h: np.ndarray
    gauge: str = "steiner"


@dataclass
class SolveInfo:
    iterations: int
    residual: float
    history: list


def _atoms(measure):
    if hasattr(measure, "normals") and hasattr(measure, "weights"):
        return np.asarray(measure.normals, float), np.asarray(measure.weights, float)
    u, f = measure
    return np.asarray(u, float), np.asarray(f, float)


def area_residual(P, f):
    """Relative sup-norm mismatch ``||A - f|| / ||f||``."""
    return float(np.max(np.abs(P.areas - f)) / np.max(np.abs(f)))


def _scaled_residual(P, f):
    kappa = float(f @ P.h) / (3.0 * P.volume)
    return float(np.max(np.abs(kappa * P.areas - f)) / np.max(np.abs(f))), kappa


def initial_support(measure):
    """Starting support numbers: 1 for smooth atoms, the cap plane for point masses.

    A point mass at ``p`` surrounded by a gap of angular radius ``rho`` in
    the smooth atoms gets ``h = cos(rho)`` (floored at 0.05), the plane that
    cuts the unit ball along the rim of the gap.  For round-sphere data this
    start is already the discrete solution up to discretization error.
    """
    u, f = _atoms(measure)
    h = np.ones(len(f))
    kind = getattr(measure, "kind", None)
    if kind is None:
        return h
    smooth = kind < 0
    if not np.any(smooth):
        return h
    for i in np.flatnonzero(~smooth):
        rho = np.arccos(np.clip(np.max(u[smooth] @ u[i]), -1.0, 1.0))
        h[i] = max(np.cos(rho), 0.05)
    return h


def perturbed_support(u, h, seed, stretch=0.1):
    """A different start: ``h`` stretched along a random axis, scaled, translated.

    ``h_i (1 + stretch <u_i, b>^2)`` deforms the start smoothly (like an
    ellipsoid); the scale factor is drawn from [1.1, 1.5].
    """
    rng = np.random.default_rng(seed)
    b = rng.normal(size=3)
    b /= np.linalg.norm(b)
    t = rng.uniform(-0.2, 0.2, size=3) * float(np.min(h))
    out = rng.uniform(1.1, 1.5) * h * (1.0 + stretch * (u @ b) ** 2)
    return out + u @ t


def _check_atoms(u, f):
    if len(f) < 4:
        raise PreconditionError("need at least four atoms")
    if not np.all(f > 0):
        raise PreconditionError("all atom weights must be positive")
    defect = np.linalg.norm(f @ u)
    if defect > 1e-9 * f.sum():
        raise PreconditionError(f"measure is not closed: |sum f u| = {defect:.3g}")
    if np.linalg.matrix_rank(u) < 3:
        raise PreconditionError("atom normals do not span R^3")


def activate_facets(u, h, ball=0.05):
    """Support numbers of a nearby body on which every facet is present.

    If some facet of ``L(h)`` is empty, ``h`` is replaced by the support
    function of ``L(h) + lam B`` sampled at the atoms (``lam = ball *
    median(h)``).  That body is strictly convex, so every plane touches it at
    its own point, which lies strictly inside all other halfspaces: each
    facet gets positive area.
    """
    h = np.array(h, dtype=float)
    P = polytope_from_support(u, h)
    if np.all(P.nonempty):
        return h
    h = P.support(u) + ball * float(np.median(h))
    if not np.all(polytope_from_support(u, h).nonempty):
        raise PreconditionError("could not make every facet of the start polytope present")
    return h


def _normalized_residual(A, f):
    return A / A.sum() - f / f.sum()


def _newton(u, f, h, opts, T):
    """Damped Newton iteration; returns ``(h, kappa, iterations, history)``.

    Directions are Newton steps for ``Psi``.  A step length ``t`` is accepted
    when every normalized facet area stays above half of its starting
    minimum and the normalized area residual shrinks by ``1 - t/2``; this
    keeps the iterates away from the nonsmooth set where facets vanish.
    """

    def project(x):
        return x - T @ (T.T @ x)

    try:
        h = activate_facets(u, h)
        P = polytope_from_support(u, h)
    except GeometryError as exc:
        raise PreconditionError(f"initial support vector is invalid: {exc}") from exc
    if opts.recenter:
        P = translate(P, -steiner_point(P))
        h = P.h
    c = float(f @ h) / 3.0
    floor = 0.5 * min(float(np.min(P.areas / P.areas.sum())), float(np.min(f / f.sum())))

    history = []
    it = 0
    res, kappa = _scaled_residual(P, f)
    rnorm = float(np.linalg.norm(_normalized_residual(P.areas, f)))
    while True:
        history.append(res)
        if res <= opts.area_tolerance:
            return h, kappa, it, history
        if it >= opts.max_iterations:
            raise ConvergenceError(f"no convergence after {it} iterations "
                                   f"(relative area residual {res:.3g})", res, it)
        if (len(history) > STALL_WINDOW
                and min(history[-STALL_WINDOW:]) > 0.5 * min(history[:-STALL_WINDOW])):
            raise ConvergenceError(f"stagnated after {it} iterations "
                                   f"(relative area residual {res:.3g})", res, it)
        it += 1
        V = P.volume
        A = P.areas
        g = project(f - (c / V) * A)
        D = mixed_area_matrix(P)
        # scale of the Hessian rows (the diagonal alone vanishes for boxes)
        typical = (c / V) * float(np.median(np.asarray(abs(D).sum(axis=1)).ravel()))
        S = (-(c / V) * D + sp.diags(np.full(len(f), opts.regularization * typical))).tocsc()
        try:
            lu = splu(S)
            y = lu.solve(g)
            z = lu.solve(A)
            beta = c / V ** 2
            d = project(-(y - z * (A @ y) / (1.0 / beta + A @ z)))
        except RuntimeError:
            d = -g / typical
        if not np.all(np.isfinite(d)):
            d = -g / typical
        t = 1.0
        Pn = None
        while t > 1e-10:
            hn = h + t * d
            if np.all(hn > 0):
                try:
                    Q = polytope_from_support(u, hn)
                except GeometryError:
                    Q = None
                if Q is not None and Q.volume > 0:
                    An = Q.areas
                    rn = float(np.linalg.norm(_normalized_residual(An, f)))
                    if np.min(An / An.sum()) >= floor and rn <= (1.0 - 0.5 * t) * rnorm:
                        Pn = Q
                        break
                    # at round-off level the residual may stall: accept a
                    # full step that does not increase it
                    if t == 1.0 and rn <= rnorm and rnorm <= 1e-12:
                        Pn = Q
                        break
            t *= opts.backtrack
        if Pn is None:
            raise ConvergenceError(f"line search failed at iteration {it} "
                                   f"(relative area residual {res:.3g})", res, it)
        P = Pn
        if opts.recenter:
            P = translate(P, -steiner_point(P))
        h = P.h
        rnorm = rn
        res, kappa = _scaled_residual(P, f)
        logger.debug("iter %d step %.3g residual %.3e", it, t, res)


def solve_minkowski(measure, opts=None, return_info=False):
    """Polytope whose facet areas match the atoms of ``measure``.

    ``measure`` is a :class:`SurfaceAreaMeasure` or a ``(normals, weights)``
    pair.  Returns ``(SupportVector, Polytope)`` in the Steiner gauge
    (Steiner point at the origin); with ``return_info`` a :class:`SolveInfo`
    is appended.

    Newton starts from ``opts.h0`` (default ``h = 1``, the unit ball).

    Raises
    ------
    PreconditionError
        Weights not positive, atoms not closed or not spanning.
    ConvergenceError
        The residual did not reach ``opts.area_tolerance``.
    """
    opts = opts or SolverOptions()
    u, f = _atoms(measure)
    _check_atoms(u, f)
    n = len(f)
    h0 = np.ones(n) if opts.h0 is None else np.array(opts.h0, dtype=float)
    if opts.perturb_seed is not None:
        h0 = perturbed_support(u, h0, opts.perturb_seed)
    if h0.shape != (n,):
        raise ValueError("h0 has the wrong length")
    T, _ = np.linalg.qr(u)          # orthonormal basis of translation modes
    h, kappa, it, history = _newton(u, f, h0, opts, T)
    P = steiner_align(polytope_from_support(u, np.sqrt(kappa) * h))
    info = SolveInfo(it, area_residual(P, f), history)
    out = (SupportVector(P.h.copy(), "steiner"), P)
    return out + (info,) if return_info else out
