"""Closed-form spherical cap geometry and the balancing condition."""
from __future__ import annotations

import math

import numpy as np

from .config import unit
from .errors import DomainError, RepairError

__all__ = ["cap_area", "cap_moment", "annulus_moment", "check_balancing",
           "balancing_tolerance", "sphere_areas", "repair_areas"]


def _check_radius(r, name="r", upper=1.0):
    if not (0.0 < r <= upper):
        raise DomainError(f"{name}={r} outside (0, {upper}]")


def cap_area(r):
    """Area of the cap ``{p : sin angle(p, q) < r, <p, q> > 0}``.

    Here ``r`` is the Euclidean radius of the cap's rim (the sine of its
    angular radius), so ``r = 1`` is a hemisphere.
    """
    _check_radius(r)
    return 2.0 * math.pi * (1.0 - math.sqrt(1.0 - r * r))


def cap_moment(q, r):
    """Vector moment ``int_B p dp`` of the cap of rim radius ``r`` about ``q``."""
    _check_radius(r)
    return math.pi * r * r * unit(q)


def annulus_moment(q, r, s):
    """Moment of the geodesic annulus between rim radii ``s`` and ``r + s``."""
    if not (r > 0 and s > 0 and r + s < 1):
        raise DomainError(f"annulus needs r>0, s>0, r+s<1 (got r={r}, s={s})")
    return math.pi * (r * r + 2.0 * r * s) * unit(q)


def sphere_areas(config):
    """Areas ``pi sin^2(theta_j) / (4 H^2)`` for which the surface is a round sphere piece."""
    return math.pi * np.sin(config.thetas) ** 2 / (4.0 * config.H ** 2)


def check_balancing(config):
    """Residual vector ``sum_j (a_j - pi sin^2 theta_j / (4H^2)) p_j``.

    Zero exactly when the data admit a capillary surface.
    """
    if config.m == 0:
        return np.zeros(3)
    coef = config.areas - sphere_areas(config)
    return coef @ config.normals


def balancing_tolerance(config, tol=1e-9):
    """Absolute tolerance for ``||check_balancing||``, relative to the area scale."""
    return tol * max(1.0, float(np.sum(np.abs(config.areas))))


def repair_areas(config):
    """Return ``config`` with the minimum-norm area change that balances it.

    The correction ``delta`` solves ``sum_j delta_j p_j = -residual`` in the
    least-squares sense with minimal Euclidean norm.  A residual at
    round-off level leaves ``config`` unchanged.  Raises
    :class:`RepairError` if some corrected area would not be positive.
    """
    res = check_balancing(config)
    if config.m == 0 or np.linalg.norm(res) <= balancing_tolerance(config, 1e-14):
        return config
    P = config.normals.T
    delta = -np.linalg.pinv(P) @ res
    a = config.areas + delta
    if np.any(a <= 0):
        bad = [j for j in range(config.m) if a[j] <= 0]
        raise RepairError(f"balancing correction makes faces {bad} non-positive")
    return config.with_areas(a)
