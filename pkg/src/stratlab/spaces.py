"""Model singular spaces: round spheres, cones, suspensions, and a round
3-sphere carrying a conical circle stratum built in normal tube coordinates.

Chart conventions (numpy rows):

* ``RoundSphereSpace(n)``: unit vectors in ``R^(n+1)``.
* ``EuclideanCone(link, R)``: ``[r, *link_point]`` with ``0 <= r <= R``;
  ``r = 0`` is the apex.
* ``SuspensionSpace(link)``: ``[t, *link_point]`` with ``t`` in ``[0, pi]``.
* ``FermiSphere(beta, alpha, blend_radius)``: unit vectors in ``R^4``.  The
  distinguished circle has extrinsic radius ``sin(beta)``; inside the tube of
  radius ``blend_radius`` around it the round metric is interpolated toward
  the conical model with total angle ``alpha``.

All sampling is exact inverse-CDF / rejection-free and reproducible from the
supplied generator.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .links import (
    Circle,
    LinkSpace,
    RoundSphere,
    Suspension,
    link_from_dict,
    sample_sin_power,
    sin_power_integral,
    sphere_area,
)
from .cones import cone_paired_distance, suspension_paired_distance

TWO_PI = 2.0 * math.pi
_EPS = 1e-9


@dataclass(frozen=True)
class Stratum:
    codim: int
    angle: Optional[float]
    label: str

    def to_dict(self):
        return {"codim": self.codim, "angle": self.angle, "label": self.label}


@dataclass
class MetricSample:
    """Metric tensor matrix at a point, in a named chart."""

    chart: str
    coords: tuple
    matrix: np.ndarray
    density: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if not np.allclose(m, m.T, atol=1e-12):
            raise ValueError("metric matrix must be symmetric")
        if np.linalg.eigvalsh(m)[0] <= 0:
            raise ValueError("metric matrix must be positive definite")
        self.matrix = m


class StratifiedModel:
    """Base class for the computable model families."""

    family: str

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def paired_distance(self, P, Q) -> np.ndarray:
        raise NotImplementedError

    def distance(self, p, q) -> float:
        return float(self.paired_distance(np.asarray(p, float), np.asarray(q, float)))

    def distances_from(self, x, P) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        P = np.asarray(P, dtype=float)
        return self.paired_distance(np.broadcast_to(x, P.shape), P)

    def sample(self, n: int, rng: np.random.Generator):
        """Points drawn from the Riemannian volume measure, with weights
        summing to the total volume."""
        raise NotImplementedError

    def proposal_sample(self, n: int, rng: np.random.Generator):
        """Coordinate-uniform proposal with density weights (nonzero-variance
        importance sampling; used for honest Monte Carlo volume estimates)."""
        raise NotImplementedError

    def strata(self) -> list:
        raise NotImplementedError

    def ricci_lower_bound(self) -> Optional[float]:
        return None

    def sectional_lower_bound(self) -> Optional[float]:
        return None

    def singular_distance(self, P) -> np.ndarray:
        """Distance to the singular set (+inf when it is empty)."""
        P = np.asarray(P, dtype=float)
        return np.full(P.shape[:-1], np.inf)

    @property
    def cutoff_scale(self) -> float:
        """Largest admissible cutoff-family parameter for this model."""
        raise NotImplementedError

    def embed(self, P) -> Optional[np.ndarray]:
        """1-Lipschitz Euclidean embedding for neighbor prefiltering, or None."""
        return None

    def check_point(self, p) -> np.ndarray:
        raise NotImplementedError

    def named_point(self, name: str) -> np.ndarray:
        raise ValueError(f"model {self.family} has no named point {name!r}")

    def polar_chart(self):
        raise ValueError(f"model {self.family} has no 2d polar chart")

    def metric_sample(self, p) -> MetricSample:
        p = np.asarray(p, dtype=float)
        return MetricSample("normal", tuple(p.tolist()),
                            np.eye(self.dim), 1.0)

    def params_dict(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "family": self.family,
            "params": self.params_dict(),
            "strata": [s.to_dict() for s in self.strata()],
        }

    def model_key(self) -> str:
        return json.dumps({"family": self.family, "params": self.params_dict()},
                          sort_keys=True)

    def model_hash(self) -> str:
        return hashlib.sha256(self.model_key().encode()).hexdigest()[:16]

    def __repr__(self):
        return f"{type(self).__name__}({self.params_dict()})"


class RoundSphereSpace(StratifiedModel):
    """Unit round n-sphere (no singular strata)."""

    family = "round_sphere"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("sphere dimension must be >= 1")
        self.n = int(n)

    @property
    def dim(self):
        return self.n

    def volume(self):
        return sphere_area(self.n)

    def diameter(self):
        return math.pi

    def paired_distance(self, P, Q):
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        dot = np.clip(np.sum(P * Q, axis=-1), -1.0, 1.0)
        return np.arccos(dot)

    def sample(self, n, rng):
        v = rng.standard_normal((n, self.n + 1))
        pts = v / np.linalg.norm(v, axis=1, keepdims=True)
        w = np.full(n, self.volume() / n)
        return pts, w

    def proposal_sample(self, n, rng):
        t = rng.uniform(0.0, math.pi, n)
        if self.n == 1:
            side = rng.integers(0, 2, n) * 2 - 1
            pts = np.column_stack([np.cos(t), side * np.sin(t)])
            w = np.full(n, 2.0 * math.pi / n)
            return pts, w
        y = rng.standard_normal((n, self.n))
        y /= np.linalg.norm(y, axis=1, keepdims=True)
        pts = np.concatenate([np.cos(t)[:, None], np.sin(t)[:, None] * y], axis=1)
        w = sphere_area(self.n - 1) * math.pi * np.sin(t) ** (self.n - 1) / n
        return pts, w

    def strata(self):
        return []

    def ricci_lower_bound(self):
        return float(self.n - 1)

    def sectional_lower_bound(self):
        return 1.0

    @property
    def cutoff_scale(self):
        return math.pi / 4

    def embed(self, P):
        return np.asarray(P, dtype=float)

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        nrm = np.linalg.norm(p, axis=-1)
        if np.any(np.abs(nrm - 1.0) > 1e-6):
            raise ValueError("round-sphere point must be a unit vector")
        return p / nrm[..., None]

    def named_point(self, name):
        e = np.zeros(self.n + 1)
        if name in ("pole", "north"):
            e[0] = 1.0
            return e
        if name == "south":
            e[0] = -1.0
            return e
        return super().named_point(name)

    def params_dict(self):
        return {"dim": self.n}


class EuclideanCone(StratifiedModel):
    """Truncated metric cone over a link, flat on its regular set."""

    family = "cone"

    def __init__(self, link: LinkSpace, radius: float):
        if radius <= 0:
            raise ValueError("truncation radius must be positive")
        self.link = link
        self.radius = float(radius)

    @property
    def dim(self):
        return self.link.dim + 1

    def volume(self):
        return self.link.volume() * self.radius ** self.dim / self.dim

    def diameter(self):
        return 2.0 * self.radius * math.sin(min(self.link.diameter(), math.pi) / 2.0)

    def paired_distance(self, P, Q):
        return cone_paired_distance(self.link, P, Q)

    def sample(self, n, rng):
        r = self.radius * rng.uniform(0.0, 1.0, n) ** (1.0 / self.dim)
        y = self.link.sample(n, rng)
        pts = np.concatenate([r[:, None], y], axis=1)
        w = np.full(n, self.volume() / n)
        return pts, w

    def proposal_sample(self, n, rng):
        r = rng.uniform(0.0, self.radius, n)
        y = self.link.sample(n, rng)
        pts = np.concatenate([r[:, None], y], axis=1)
        w = self.link.volume() * self.radius * r ** self.link.dim / n
        return pts, w

    def strata(self):
        out = []
        if isinstance(self.link, Circle):
            if abs(self.link.radius - 1.0) > 1e-12:
                out.append(Stratum(2, TWO_PI * self.link.radius, "apex"))
        else:
            out.append(Stratum(self.dim, None, "apex"))
            for a in self.link.circle_factors():
                if abs(a - 1.0) > 1e-12:
                    out.append(Stratum(2, TWO_PI * a, "singular rays"))
        return out

    def ricci_lower_bound(self):
        # any circle factor wider than 2*pi concentrates negative curvature
        # on the corresponding ray, so no global lower bound survives
        if any(a > 1.0 + 1e-12 for a in self.link.circle_factors()):
            return None
        return 0.0

    def sectional_lower_bound(self):
        if any(a > 1.0 + 1e-12 for a in self.link.circle_factors()):
            return None
        return 0.0

    def singular_distance(self, P):
        P = np.asarray(P, dtype=float)
        r = P[..., 0]
        if not self.strata():
            return np.full(P.shape[:-1], np.inf)
        d = np.array(r, dtype=float, copy=True)
        for y0 in _link_singular_points(self.link):
            sep = np.minimum(self.link.paired_distance(P[..., 1:], y0), math.pi / 2)
            d = np.minimum(d, r * np.sin(sep))
        return d

    @property
    def cutoff_scale(self):
        return self.radius / 2.0

    def embed(self, P):
        if max(self.link.circle_factors(), default=0.0) > 1.0:
            return None
        P = np.asarray(P, dtype=float)
        r = P[..., 0:1]
        inner = self.link.embed(P[..., 1:])
        if isinstance(self.link, Circle):
            a = self.link.radius
            pad = r * math.sqrt(max(1.0 - a * a, 0.0))
            return np.concatenate([r * inner, pad], axis=-1)
        return r * inner

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        r = p[..., 0]
        if np.any(r < -_EPS) or np.any(r > self.radius + _EPS):
            raise ValueError(f"cone radial coordinate outside [0, {self.radius}]")
        self.link.check_point(p[..., 1:])
        return p

    def named_point(self, name):
        if name == "apex":
            return np.concatenate([[0.0], self.link.reference_point()])
        if name == "mid":
            return np.concatenate([[self.radius / 2.0], self.link.reference_point()])
        return super().named_point(name)

    def polar_chart(self):
        if isinstance(self.link, Circle):
            return "cone", self.link
        raise ValueError("polar chart requires a circle link")

    def metric_sample(self, p):
        p = np.asarray(p, dtype=float)
        if isinstance(self.link, Circle):
            r = float(p[0])
            if r <= 0:
                raise ValueError("metric sample undefined at the apex")
            m = np.diag([1.0, r * r])
            return MetricSample("polar", tuple(p.tolist()), m, r)
        return super().metric_sample(p)

    def params_dict(self):
        return {"link": self.link.to_dict(), "radius": self.radius}


class SuspensionSpace(StratifiedModel):
    """Spherical suspension of a link; unit curvature on the regular set."""

    family = "suspension"

    def __init__(self, link: LinkSpace):
        self.link = link

    @property
    def dim(self):
        return self.link.dim + 1

    def volume(self):
        return self.link.volume() * sin_power_integral(self.link.dim)

    def diameter(self):
        return math.pi

    def paired_distance(self, P, Q):
        return suspension_paired_distance(self.link, P, Q)

    def sample(self, n, rng):
        t = sample_sin_power(self.link.dim, n, rng)
        y = self.link.sample(n, rng)
        pts = np.concatenate([t[:, None], y], axis=1)
        w = np.full(n, self.volume() / n)
        return pts, w

    def proposal_sample(self, n, rng):
        t = rng.uniform(0.0, math.pi, n)
        y = self.link.sample(n, rng)
        pts = np.concatenate([t[:, None], y], axis=1)
        w = self.link.volume() * math.pi * np.sin(t) ** self.link.dim / n
        return pts, w

    def strata(self):
        if isinstance(self.link, RoundSphere):
            return []
        if isinstance(self.link, Circle):
            a = self.link.radius
            if abs(a - 1.0) < 1e-12:
                return []
            return [Stratum(2, TWO_PI * a, "pole t=0"),
                    Stratum(2, TWO_PI * a, "pole t=pi")]
        return [Stratum(2, TWO_PI * a, "singular circle")
                for a in self.link.circle_factors()
                if abs(a - 1.0) > 1e-12]

    def ricci_lower_bound(self):
        if any(a > 1.0 + 1e-12 for a in self.link.circle_factors()):
            return None
        return float(self.dim - 1)

    def sectional_lower_bound(self):
        if any(a > 1.0 + 1e-12 for a in self.link.circle_factors()):
            return None
        return 1.0

    def singular_distance(self, P):
        P = np.asarray(P, dtype=float)
        t = P[..., 0]
        if isinstance(self.link, RoundSphere):
            return np.full(P.shape[:-1], np.inf)
        if isinstance(self.link, Circle):
            if abs(self.link.radius - 1.0) < 1e-12:
                return np.full(P.shape[:-1], np.inf)
            return np.minimum(t, math.pi - t)
        if isinstance(self.link, Suspension) and isinstance(self.link.base, Circle):
            # singular circle through both poles and the link's poles
            u = P[..., 1]
            c = np.sqrt(np.clip(np.cos(t) ** 2
                                + (np.sin(t) * np.cos(u)) ** 2, 0.0, 1.0))
            return np.arccos(c)
        raise NotImplementedError("singular distance for deeper links")

    @property
    def cutoff_scale(self):
        return math.pi / 4

    def embed(self, P):
        if max(self.link.circle_factors(), default=0.0) > 1.0:
            return None
        P = np.asarray(P, dtype=float)
        t = P[..., 0]
        inner = self.link.embed(P[..., 1:])
        return np.concatenate([np.cos(t)[..., None],
                               np.sin(t)[..., None] * inner], axis=-1)

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        t = p[..., 0]
        if np.any(t < -_EPS) or np.any(t > math.pi + _EPS):
            raise ValueError("suspension height outside [0, pi]")
        self.link.check_point(p[..., 1:])
        return p

    def named_point(self, name):
        if name in ("pole", "south"):
            return np.concatenate([[0.0], self.link.reference_point()])
        if name == "north":
            return np.concatenate([[math.pi], self.link.reference_point()])
        if name == "equator":
            return np.concatenate([[math.pi / 2.0], self.link.reference_point()])
        return super().named_point(name)

    def polar_chart(self):
        if isinstance(self.link, Circle):
            return "suspension", self.link
        raise ValueError("polar chart requires a circle link")

    def metric_sample(self, p):
        p = np.asarray(p, dtype=float)
        if isinstance(self.link, Circle):
            t = float(p[0])
            if t <= 0 or t >= math.pi:
                raise ValueError("metric sample undefined at a pole")
            m = np.diag([1.0, math.sin(t) ** 2])
            return MetricSample("warped", tuple(p.tolist()), m, math.sin(t))
        return super().metric_sample(p)

    def params_dict(self):
        return {"link": self.link.to_dict()}


def _link_singular_points(link: LinkSpace):
    """Coordinates of the link's own singular points (for ray strata)."""
    if isinstance(link, Suspension) and isinstance(link.base, Circle):
        if abs(link.base.radius - 1.0) > 1e-12:
            return [link.pole(False), link.pole(True)]
    return []


# ---------------------------------------------------------------------------
# Fermi tube chart on the 3-sphere


def fermi_theta_component(beta: float, r, phi):
    """The squared length of the tube's axial coordinate vector field."""
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return (np.cos(r) ** 2 * math.sin(beta) ** 2
            + np.sin(r) ** 2 * math.cos(beta) ** 2 * np.sin(phi) ** 2
            + np.cos(r) * np.sin(r) * math.sin(2.0 * beta) * np.sin(phi))


def fermi_metric(beta: float, r: float, theta: float, phi: float) -> MetricSample:
    """Round-metric components in tube coordinates around the circle.

    Diagonal: (1, sin^2 r, axial component); valid for 0 < r < beta limit.
    """
    if not 0 < beta <= math.pi / 2 + 1e-12:
        raise ValueError("beta must lie in (0, pi/2]")
    if not 0 < r < fermi_chart_limit(beta):
        raise ValueError(
            f"tube radius r={r} outside the chart validity range "
            f"(0, {fermi_chart_limit(beta):.6g})")
    g_pp = math.sin(r) ** 2
    g_tt = float(fermi_theta_component(beta, r, phi))
    m = np.diag([1.0, g_pp, g_tt])
    return MetricSample("fermi", (r, theta, phi), m, math.sqrt(g_pp * g_tt))


def fermi_chart_limit(beta: float) -> float:
    """Largest tube radius before the chart degenerates."""
    return beta


def fermi_expansion_fit(beta: float, phi: float = math.pi / 2.0,
                        r_max: float = 3e-2, n_pts: int = 24):
    """Power-law fit of the axial metric deviation near the circle.

    Fits |g_axial(beta, r, phi) - g_axial(beta, 0, phi)| ~ coeff * r^gamma
    over a small-radius ladder and returns (gamma, coeff).  For beta = pi/2
    the deviation is quadratic; away from it the linear term carries the
    coefficient sin(2 beta) sin(phi).
    """
    if not 0 < beta <= math.pi / 2 + 1e-12:
        raise ValueError("beta must lie in (0, pi/2]")
    r = np.logspace(math.log10(r_max) - 1.5, math.log10(r_max), n_pts)
    base = math.sin(beta) ** 2
    dev = np.abs(fermi_theta_component(beta, r, phi) - base)
    if np.any(dev <= 0):
        raise ValueError("axial deviation vanished on the fit ladder")
    slope, intercept = np.polyfit(np.log(r), np.log(dev), 1)
    return float(slope), float(math.exp(intercept))


def fermi_embedding(beta: float, r, theta, phi) -> np.ndarray:
    """The tube chart's defining map into the unit 3-sphere in R^4."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    axial = np.cos(r) * math.sin(beta) + np.sin(r) * math.cos(beta) * np.sin(phi)
    x1 = np.cos(r) * math.cos(beta) - np.sin(r) * math.sin(beta) * np.sin(phi)
    x2 = np.sin(r) * np.cos(phi)
    return np.stack([x1, x2, axial * np.cos(theta), axial * np.sin(theta)],
                    axis=-1)


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    def bump(t):
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1.0 / t[pos])
        return out
    a = bump(u.copy())
    b = bump(1.0 - u)
    return a / (a + b)


class FermiSphere(StratifiedModel):
    """Round 3-sphere with a conical circle stratum of total angle alpha.

    The circle has extrinsic radius sin(beta).  Inside the tube of radius
    ``blend_radius`` the angular metric component is interpolated smoothly
    from the conical model (active below blend_radius/2) back to the round
    metric (outside blend_radius).  At alpha = 2*pi the model is exactly the
    round sphere.
    """

    family = "fermi_sphere"

    def __init__(self, beta: float, alpha: float, blend_radius: float = None):
        if not 0 < beta <= math.pi / 2 + 1e-12:
            raise ValueError("beta must lie in (0, pi/2]")
        if alpha <= 0:
            raise ValueError("cone angle alpha must be positive")
        if blend_radius is None:
            blend_radius = 0.5 * fermi_chart_limit(beta)
        if not 0 < blend_radius < fermi_chart_limit(beta):
            raise ValueError("blend radius must sit inside the tube chart")
        self.beta = float(beta)
        self.alpha = float(alpha)
        self.blend_radius = float(blend_radius)
        self._volume_cache = None

    @property
    def dim(self):
        return 3

    @property
    def angle_factor(self):
        return self.alpha / TWO_PI

    def blend(self, r):
        """Interpolation weight of the conical model at tube radius r."""
        r = np.asarray(r, dtype=float)
        u = (r - self.blend_radius / 2.0) / (self.blend_radius / 2.0)
        return 1.0 - smooth_step(u)

    def angular_factor_sq(self, r):
        """Multiplier applied to the round sin^2(r) angular component."""
        c2 = self.angle_factor ** 2
        return 1.0 + self.blend(r) * (c2 - 1.0)

    def metric_components(self, r, phi):
        """(g_rr, g_phiphi, g_thetatheta) of the modified metric."""
        r = np.asarray(r, dtype=float)
        g_pp = self.angular_factor_sq(r) * np.sin(r) ** 2
        g_tt = fermi_theta_component(self.beta, r, phi)
        return np.ones_like(g_pp), g_pp, g_tt

    def relative_density(self, P):
        """sqrt(det g_modified)/sqrt(det g_round) at ambient points."""
        r, _, _ = self.fermi_coords(P)
        out = np.ones_like(r)
        inside = (r < self.blend_radius) & (r > 0)
        out[inside] = np.sqrt(self.angular_factor_sq(r[inside]))
        return out

    def fermi_coords(self, P):
        P = np.asarray(P, dtype=float)
        rho = np.hypot(P[..., 2], P[..., 3])
        theta = np.arctan2(P[..., 3], P[..., 2])
        cr = np.clip(P[..., 0] * math.cos(self.beta) + rho * math.sin(self.beta),
                     -1.0, 1.0)
        r = np.arccos(cr)
        sr = np.sin(r)
        safe = np.where(sr > 0, sr, 1.0)
        sin_phi = (rho * math.cos(self.beta) - P[..., 0] * math.sin(self.beta)) / safe
        cos_phi = P[..., 1] / safe
        phi = np.arctan2(sin_phi, cos_phi)
        return r, theta, phi

    def volume(self):
        if self._volume_cache is None:
            vol_round = sphere_area(3)
            self._volume_cache = vol_round + self._tube_volume_correction()
        return self._volume_cache

    def _tube_volume_correction(self, order: int = 96):
        xs, base_w = np.polynomial.legendre.leggauss(order)
        r = 0.5 * self.blend_radius * (xs + 1.0)
        wr = 0.5 * self.blend_radius * base_w
        phi = math.pi * (xs + 1.0)
        wphi = math.pi * base_w
        R, PHI = np.meshgrid(r, phi, indexing="ij")
        g_tt = fermi_theta_component(self.beta, R, PHI)
        sqrt_tt = np.sqrt(np.maximum(g_tt, 0.0))
        factor = (np.sqrt(self.angular_factor_sq(r)) - 1.0)[:, None]
        integrand = factor * np.sin(R) * sqrt_tt
        inner = integrand @ wphi
        return TWO_PI * float(wr @ inner)

    def diameter(self):
        return math.pi

    def paired_distance(self, P, Q):
        """Round-metric distance; exact for alpha = 2*pi, used as the
        reference geodesic structure otherwise."""
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        dot = np.clip(np.sum(P * Q, axis=-1), -1.0, 1.0)
        return np.arccos(dot)

    def sample(self, n, rng):
        v = rng.standard_normal((n, 4))
        pts = v / np.linalg.norm(v, axis=1, keepdims=True)
        base = sphere_area(3) / n
        w = base * self.relative_density(pts)
        return pts, w

    def proposal_sample(self, n, rng):
        return self.sample(n, rng)

    def strata(self):
        return [Stratum(2, self.alpha, "singular circle")]

    def ricci_lower_bound(self):
        if abs(self.alpha - TWO_PI) < 1e-12:
            return 2.0
        return None

    def sectional_lower_bound(self):
        if abs(self.alpha - TWO_PI) < 1e-12:
            return 1.0
        return None

    def ricci_blend_estimate(self, n_r: int = 7, n_phi: int = 5) -> float:
        """Numeric minimum Ricci eigenvalue across the blend annulus."""
        from .curvature import min_ricci_eigenvalue

        def metric_fn(x):
            r, phi = x[0], x[1]
            _, g_pp, g_tt = self.metric_components(r, phi)
            return np.diag([1.0, float(g_pp), float(g_tt)])

        rs = np.linspace(0.3 * self.blend_radius, 0.98 * self.blend_radius, n_r)
        phis = np.linspace(0.1, TWO_PI - 0.1, n_phi)
        worst = np.inf
        for r in rs:
            for phi in phis:
                val = min_ricci_eigenvalue(metric_fn, np.array([r, phi, 0.0]))
                worst = min(worst, val)
        return float(worst)

    def singular_distance(self, P):
        r, _, _ = self.fermi_coords(P)
        return r

    def circle_point(self, theta: float = 0.0) -> np.ndarray:
        return np.array([math.cos(self.beta), 0.0,
                         math.sin(self.beta) * math.cos(theta),
                         math.sin(self.beta) * math.sin(theta)])

    def geodesic_arc(self, p, q, k: int = 128) -> np.ndarray:
        """Round-metric great-circle arc from p to q (k sample points)."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        ang = float(np.arccos(np.clip(p @ q, -1.0, 1.0)))
        if ang < 1e-12:
            return np.broadcast_to(p, (k, 4)).copy()
        ts = np.linspace(0.0, 1.0, k)
        arc = (np.sin((1.0 - ts) * ang)[:, None] * p
               + np.sin(ts * ang)[:, None] * q) / math.sin(ang)
        return arc / np.linalg.norm(arc, axis=1, keepdims=True)

    @property
    def cutoff_scale(self):
        return self.beta / 2.0

    def embed(self, P):
        if abs(self.alpha - TWO_PI) < 1e-12:
            return np.asarray(P, dtype=float)
        return None

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        nrm = np.linalg.norm(p, axis=-1)
        if np.any(np.abs(nrm - 1.0) > 1e-6):
            raise ValueError("ambient point must be a unit vector in R^4")
        return p / nrm[..., None]

    def named_point(self, name):
        if name == "on_circle":
            return self.circle_point(0.0)
        if name == "far":
            return np.array([-1.0, 0.0, 0.0, 0.0])
        if name in ("pole", "north"):
            return np.array([0.0, 1.0, 0.0, 0.0])
        return super().named_point(name)

    def metric_sample(self, p):
        p = np.asarray(p, dtype=float)
        r, theta, phi = (float(v) for v in self.fermi_coords(p))
        if 0 < r < fermi_chart_limit(self.beta):
            _, g_pp, g_tt = self.metric_components(r, phi)
            m = np.diag([1.0, float(g_pp), float(g_tt)])
            return MetricSample("fermi", (r, theta, phi), m,
                                math.sqrt(float(g_pp) * float(g_tt)))
        return MetricSample("normal", tuple(p.tolist()), np.eye(3), 1.0)

    def params_dict(self):
        return {"beta": self.beta, "alpha": self.alpha,
                "blend_radius": self.blend_radius}


# ---------------------------------------------------------------------------
# Serialization and module-level operations


def model_from_dict(data: dict) -> StratifiedModel:
    family = data.get("family")
    params = data.get("params", {})
    if family == "round_sphere":
        model = RoundSphereSpace(int(params["dim"]))
    elif family == "cone":
        model = EuclideanCone(link_from_dict(params["link"]),
                              float(params["radius"]))
    elif family == "suspension":
        model = SuspensionSpace(link_from_dict(params["link"]))
    elif family == "fermi_sphere":
        model = FermiSphere(float(params["beta"]), float(params["alpha"]),
                            float(params.get("blend_radius"))
                            if params.get("blend_radius") else None)
    else:
        raise ValueError(f"unknown model family: {family!r}")
    given = data.get("strata")
    if given is not None:
        derived = [(s.codim, s.angle) for s in model.strata()]
        stated = [(int(s["codim"]), s.get("angle")) for s in given]
        for codim, angle in stated:
            match = [d for d in derived if d[0] == codim and
                     (angle is None or d[1] is None or abs(d[1] - angle) < 1e-9)]
            if not match:
                raise ValueError(
                    f"declared stratum (codim={codim}, angle={angle}) does not "
                    f"match the model family")
    return model


def model_to_json(model: StratifiedModel) -> str:
    return json.dumps(model.to_dict(), indent=2, sort_keys=True)


def model_from_json(text: str) -> StratifiedModel:
    return model_from_dict(json.loads(text))


def tangent_sphere(model: StratifiedModel, x) -> LinkSpace:
    """Cross-section of the tangent cone at x (one dimension down)."""
    x = np.asarray(x, dtype=float)
    if isinstance(model, RoundSphereSpace):
        return RoundSphere(model.dim - 1)
    if isinstance(model, EuclideanCone):
        if x[0] <= _EPS:
            return model.link
        sep = model.singular_distance(x[None, :])[0]
        if sep <= _EPS:
            return Suspension(Circle(_ray_angle_factor(model, x)))
        return RoundSphere(model.dim - 1)
    if isinstance(model, SuspensionSpace):
        t = x[0]
        if isinstance(model.link, Circle):
            if t <= _EPS or t >= math.pi - _EPS:
                return model.link
        elif model.singular_distance(x[None, :])[0] <= _EPS:
            factors = model.link.circle_factors()
            return Suspension(Circle(factors[0]))
        if t <= _EPS or t >= math.pi - _EPS:
            return model.link
        return RoundSphere(model.dim - 1)
    if isinstance(model, FermiSphere):
        if model.singular_distance(x[None, :])[0] <= 1e-7:
            return Suspension(Circle(model.angle_factor))
        return RoundSphere(2)
    raise ValueError("unsupported model")


def _ray_angle_factor(model: EuclideanCone, x) -> float:
    factors = model.link.circle_factors()
    return factors[0] if factors else 1.0


def regular_ricci_bound(model: StratifiedModel):
    """Analytic Ricci lower bound on the regular set, when the family has one."""
    return model.ricci_lower_bound()
