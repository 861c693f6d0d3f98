"""Link spaces: the cross-sections that cones and suspensions are built over.

Three families are supported and can be nested: circles of arbitrary radius,
unit round spheres, and spherical suspensions of either.  Points are numpy
arrays in the chart conventions below:

* ``Circle(a)``: one coordinate, the arc-length position ``s`` in ``[0, 2*pi*a)``.
* ``RoundSphere(m)``: a unit vector in ``R^(m+1)``.
* ``Suspension(base)``: ``[t, *base_point]`` with the height ``t`` in ``[0, pi]``;
  ``t = 0`` and ``t = pi`` are the poles.

All distance functions are exact closed forms, vectorized over leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EPS = 1e-9


def sphere_area(m: int) -> float:
    """Riemannian volume of the unit m-sphere (length for m=1, area for m=2...)."""
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def sin_power_integral(m: int) -> float:
    """Integral of sin(t)^m over [0, pi]."""
    return math.sqrt(math.pi) * math.gamma((m + 1) / 2.0) / math.gamma(m / 2.0 + 1.0)


def sample_sin_power(m: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw t in [0, pi] with density proportional to sin(t)^m.

    Substituting x = (1 - cos t)/2 turns the density into a symmetric Beta
    law, so the draw is exact for every integer m >= 0.
    """
    if m == 0:
        return rng.uniform(0.0, math.pi, size)
    x = rng.beta((m + 1) / 2.0, (m + 1) / 2.0, size)
    return np.arccos(1.0 - 2.0 * x)


class LinkSpace:
    """Base class; see module docstring for the point conventions."""

    dim: int
    coord_dim: int

    def diameter(self) -> float:
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def distance(self, p, q) -> float:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        return float(np.asarray(self.paired_distance(p, q)).reshape(()))

    def paired_distance(self, P, Q) -> np.ndarray:
        """Geodesic distance, broadcasting over leading axes."""
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def check_point(self, p) -> np.ndarray:
        """Validate chart coordinates; returns the point as a float array."""
        raise NotImplementedError

    def embed(self, P) -> np.ndarray:
        """A 1-Lipschitz map into Euclidean space (chordal <= geodesic).

        Used only to prefilter neighbor candidates; exact distances are
        always recomputed from the chart coordinates.
        """
        raise NotImplementedError

    def circle_factors(self):
        """Radii of the circle factors that generate codimension-2 strata."""
        return []

    def reference_point(self) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Circle(LinkSpace):
    """Circle of radius ``radius``; intrinsic diameter pi*radius."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("circle radius must be positive")

    @property
    def dim(self):
        return 1

    @property
    def coord_dim(self):
        return 1

    @property
    def length(self):
        return 2.0 * math.pi * self.radius

    def diameter(self):
        return math.pi * self.radius

    def volume(self):
        return self.length

    def paired_distance(self, P, Q):
        s = np.asarray(P, dtype=float)[..., 0]
        t = np.asarray(Q, dtype=float)[..., 0]
        gap = np.abs(s - t) % self.length
        return np.minimum(gap, self.length - gap)

    def sample(self, n, rng):
        return rng.uniform(0.0, self.length, n)[:, None]

    def check_point(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        s = p[..., 0]
        if np.any(s < -_EPS) or np.any(s > self.length + _EPS):
            raise ValueError(
                f"circle coordinate outside [0, {self.length:.6g}): {s}")
        return p

    def embed(self, P):
        s = np.asarray(P, dtype=float)[..., 0] / self.radius
        return self.radius * np.stack([np.cos(s), np.sin(s)], axis=-1)

    def circle_factors(self):
        return [self.radius]

    def reference_point(self):
        return np.zeros(1)

    def to_dict(self):
        return {"kind": "circle", "radius": self.radius}


@dataclass(frozen=True)
class RoundSphere(LinkSpace):
    """Unit round sphere of dimension ``sphere_dim``, points as unit vectors."""

    sphere_dim: int

    def __post_init__(self):
        if not self.sphere_dim >= 1:
            raise ValueError("sphere dimension must be a positive integer")

    @property
    def dim(self):
        return self.sphere_dim

    @property
    def coord_dim(self):
        return self.sphere_dim + 1

    def diameter(self):
        return math.pi

    def volume(self):
        return sphere_area(self.sphere_dim)

    def paired_distance(self, P, Q):
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        dot = np.clip(np.sum(P * Q, axis=-1), -1.0, 1.0)
        return np.arccos(dot)

    def sample(self, n, rng):
        v = rng.standard_normal((n, self.coord_dim))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    def check_point(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        norms = np.linalg.norm(p, axis=-1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValueError("sphere point must be a unit vector")
        return p / norms[..., None]

    def embed(self, P):
        return np.asarray(P, dtype=float)

    def reference_point(self):
        e = np.zeros(self.coord_dim)
        e[0] = 1.0
        return e

    def to_dict(self):
        return {"kind": "round_sphere", "dim": self.sphere_dim}


@dataclass(frozen=True)
class Suspension(LinkSpace):
    """Spherical suspension of a base link; poles at height 0 and pi."""

    base: LinkSpace

    @property
    def dim(self):
        return self.base.dim + 1

    @property
    def coord_dim(self):
        return self.base.coord_dim + 1

    def diameter(self):
        return math.pi

    def volume(self):
        return self.base.volume() * sin_power_integral(self.base.dim)

    def paired_distance(self, P, Q):
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        t, s = P[..., 0], Q[..., 0]
        base_d = self.base.paired_distance(P[..., 1:], Q[..., 1:])
        c = np.cos(np.minimum(base_d, math.pi))
        arg = np.cos(t) * np.cos(s) + np.sin(t) * np.sin(s) * c
        return np.arccos(np.clip(arg, -1.0, 1.0))

    def sample(self, n, rng):
        t = sample_sin_power(self.base.dim, n, rng)
        y = self.base.sample(n, rng)
        return np.concatenate([t[:, None], y], axis=1)

    def check_point(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        t = p[..., 0]
        if np.any(t < -_EPS) or np.any(t > math.pi + _EPS):
            raise ValueError(f"suspension height outside [0, pi]: {t}")
        self.base.check_point(p[..., 1:])
        return p

    def embed(self, P):
        P = np.asarray(P, dtype=float)
        t = P[..., 0]
        inner = self.base.embed(P[..., 1:])
        return np.concatenate(
            [np.cos(t)[..., None], np.sin(t)[..., None] * inner], axis=-1)

    def circle_factors(self):
        return self.base.circle_factors()

    def pole(self, top: bool = False) -> np.ndarray:
        t = math.pi if top else 0.0
        return np.concatenate([[t], self.base.reference_point()])

    def reference_point(self):
        return self.pole()

    def to_dict(self):
        return {"kind": "suspension", "base": self.base.to_dict()}


def link_from_dict(data: dict) -> LinkSpace:
    kind = data.get("kind")
    if kind == "circle":
        return Circle(float(data["radius"]))
    if kind == "round_sphere":
        return RoundSphere(int(data["dim"]))
    if kind == "suspension":
        return Suspension(link_from_dict(data["base"]))
    raise ValueError(f"unknown link kind: {kind!r}")


def link_distance(link: LinkSpace, p, q) -> float:
    """Geodesic distance between two validated link points."""
    p = link.check_point(p)
    q = link.check_point(q)
    return link.distance(p, q)


def link_diameter(link: LinkSpace) -> float:
    return link.diameter()
