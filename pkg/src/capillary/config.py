"""Input data for the capillary construction and its JSON representation.

A configuration holds the mean curvature ``H`` and, per container face, the
unit normal ``p``, the contact angle ``theta`` (radians) and the prescribed
area ``a``.  Config files use degrees::

    {"H": 0.5,
     "faces": [{"p": [0, 0, 1], "theta_deg": 120, "a": 2.356194490192345}],
     "flags": {"allow_theta_pi": false}}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError

UNIT_TOL = 1e-12
ANGLE_TOL = 1e-12


def unit(v):
    """Return ``v`` renormalized to unit length as a float array."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ConfigError("zero vector cannot be normalized")
    return v / n


def spherical_angle(p, q):
    """Angle in [0, pi] between directions ``p`` and ``q`` (atan2 form)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.arctan2(np.linalg.norm(np.cross(p, q), axis=-1), np.sum(p * q, axis=-1))


@dataclass(frozen=True)
class Face:
    p: np.ndarray
    theta: float
    a: float

    def __post_init__(self):
        object.__setattr__(self, "p", unit(self.p))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "a", float(self.a))

    @property
    def cap_radius(self):
        """Angular radius ``pi - theta`` of the excluded cap around ``p``."""
        return math.pi - self.theta


@dataclass(frozen=True)
class CapillaryConfig:
    H: float
    faces: tuple = ()
    allow_theta_pi: bool = False
    allow_theta_half_pi: bool = False
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "H", float(self.H))
        object.__setattr__(self, "faces", tuple(self.faces))
        if self.validate:
            self.check()

    @property
    def m(self):
        return len(self.faces)

    @property
    def normals(self):
        return np.array([f.p for f in self.faces]).reshape(-1, 3)

    @property
    def thetas(self):
        return np.array([f.theta for f in self.faces], dtype=float)

    @property
    def areas(self):
        return np.array([f.a for f in self.faces], dtype=float)

    @property
    def scale(self):
        """Length factor ``1/(2H)`` from the normalized problem to output units."""
        return 1.0 / (2.0 * self.H)

    def with_areas(self, a):
        faces = tuple(replace(f, a=float(x)) for f, x in zip(self.faces, a))
        return replace(self, faces=faces)

    def problems(self):
        """List human-readable hypothesis violations (empty when valid)."""
        out = []
        if not (self.H > 0 and math.isfinite(self.H)):
            out.append(f"H must be positive, got {self.H}")
        n_right = 0
        for j, f in enumerate(self.faces):
            if not f.a > 0:
                out.append(f"face {j}: area a={f.a} must be positive")
            th = f.theta
            if abs(th - math.pi / 2) <= ANGLE_TOL:
                n_right += 1
                if not self.allow_theta_half_pi:
                    out.append(f"face {j}: theta = 90 deg requires the reflection doubling "
                               "(allow_theta_half_pi)")
            elif abs(th - math.pi) <= ANGLE_TOL:
                if not self.allow_theta_pi:
                    out.append(f"face {j}: theta = 180 deg requires allow_theta_pi")
            elif not (math.pi / 2 < th < math.pi):
                out.append(f"face {j}: theta = {math.degrees(th):.6g} deg outside (90, 180)")
        if n_right > 1:
            out.append("at most one face may have theta = 90 deg")
        for i in range(self.m):
            for j in range(i + 1, self.m):
                fi, fj = self.faces[i], self.faces[j]
                ang = float(spherical_angle(fi.p, fj.p))
                need = fi.cap_radius + fj.cap_radius
                if not ang > need + ANGLE_TOL:
                    out.append(f"faces {i},{j}: closed caps intersect "
                               f"(separation {math.degrees(ang):.6g} deg <= "
                               f"{math.degrees(need):.6g} deg)")
        return out

    def check(self):
        errs = self.problems()
        if errs:
            raise ConfigError("; ".join(errs))
        return self

    # -- serialization -------------------------------------------------

    def to_dict(self):
        d = {
            "H": self.H,
            "faces": [{"p": [float(x) for x in f.p],
                       "theta_deg": math.degrees(f.theta),
                       "a": f.a} for f in self.faces],
        }
        flags = {}
        if self.allow_theta_pi:
            flags["allow_theta_pi"] = True
        if self.allow_theta_half_pi:
            flags["allow_theta_half_pi"] = True
        if flags:
            d["flags"] = flags
        return d

    def to_json(self, **kw):
        kw.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d, validate=True):
        try:
            H = float(d["H"])
            faces = []
            for f in d["faces"]:
                if "theta_deg" in f:
                    th = math.radians(float(f["theta_deg"]))
                else:
                    th = float(f["theta"])
                p = [float(x) for x in f["p"]]
                if len(p) != 3:
                    raise ValueError("p must have three components")
                faces.append(Face(np.array(p), th, float(f["a"])))
            flags = d.get("flags", {}) or {}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed config: {exc}") from exc
        return cls(H, tuple(faces),
                   allow_theta_pi=bool(flags.get("allow_theta_pi", False)),
                   allow_theta_half_pi=bool(flags.get("allow_theta_half_pi", False)),
                   validate=validate)


def load_config(path, validate=True):
    """Read a JSON config file; raises ``ValueError`` on malformed input."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed config: {exc}") from exc
    return CapillaryConfig.from_dict(d, validate=validate)


def save_config(config, path):
    Path(path).write_text(config.to_json() + "\n", encoding="utf-8")
