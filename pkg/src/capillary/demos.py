"""Built-in demonstration configurations (all at ``H = 1/2``)."""
from __future__ import annotations

import math

import numpy as np

from .config import CapillaryConfig, Face

__all__ = ["DEMOS", "demo_config"]


def _sphere_m1():
    return CapillaryConfig(0.5, (Face((0.0, 0.0, 1.0), 2 * math.pi / 3, 3 * math.pi / 4),))


def _antipodal_m2():
    t = 3 * math.pi / 4
    return CapillaryConfig(0.5, (Face((0.0, 0.0, 1.0), t, 2.0), Face((0.0, 0.0, -1.0), t, 2.0)))


def _equatorial_m3():
    # caps of angular radius pi/4 about normals 120 degrees apart
    t = 3 * math.pi / 4
    lon = 2 * math.pi * np.arange(3) / 3
    return CapillaryConfig(0.5, tuple(Face((math.cos(a), math.sin(a), 0.0), t, 2.0) for a in lon))


def _tetrahedral_m4():
    t = 3 * math.pi / 4
    dirs = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    return CapillaryConfig(0.5, tuple(Face(d, t, 2.0) for d in dirs))


def _rightangle_m2():
    return CapillaryConfig(0.5, (Face((0.0, 0.0, -1.0), 2 * math.pi / 3, 3 * math.pi / 4),
                                 Face((0.0, 0.0, 1.0), math.pi / 2, math.pi)),
                           allow_theta_half_pi=True)


DEMOS = {
    "sphere-m1": _sphere_m1,
    "antipodal-m2": _antipodal_m2,
    "equatorial-m3": _equatorial_m3,
    "tetrahedral-m4": _tetrahedral_m4,
    "rightangle-m2": _rightangle_m2,
}


def demo_config(name):
    """The named demo configuration; ``KeyError`` for unknown names."""
    try:
        return DEMOS[name]()
    except KeyError:
        raise KeyError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}") from None
