"""Exact geometry on metric cones and spherical suspensions.

Distances use the closed cone formula with the link separation truncated at
pi; minimizing geodesics on flat cones are computed by developing the cone
onto a planar sector.  A through-tip path is minimizing exactly when the link
separation of the endpoint directions reaches pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .links import Circle, LinkSpace
from .report import CheckReport, MetricConsistencyError


@dataclass(frozen=True)
class ConePoint:
    """Point of a cone in polar form; r = 0 is the tip regardless of y."""

    r: float
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(self.y, dtype=float)))
        if self.r < 0:
            raise ValueError("radial coordinate must be nonnegative")

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.r], self.y])


def _as_cone_arrays(p):
    if isinstance(p, ConePoint):
        return p.r, p.y
    p = np.asarray(p, dtype=float)
    return p[..., 0], p[..., 1:]


def cone_distance(p, q, link: LinkSpace) -> float:
    """Exact distance on the metric cone over ``link``."""
    r, y = _as_cone_arrays(p)
    s, z = _as_cone_arrays(q)
    sep = np.minimum(link.paired_distance(y, z), math.pi)
    d2 = r * r + s * s - 2.0 * r * s * np.cos(sep)
    return float(np.sqrt(np.maximum(d2, 0.0)))


def cone_paired_distance(link: LinkSpace, P, Q) -> np.ndarray:
    """Vectorized cone distance on arrays of [r, link coords] rows."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    r, s = P[..., 0], Q[..., 0]
    sep = np.minimum(link.paired_distance(P[..., 1:], Q[..., 1:]), math.pi)
    d2 = r * r + s * s - 2.0 * r * s * np.cos(sep)
    return np.sqrt(np.maximum(d2, 0.0))


def suspension_distance(p, q, link: LinkSpace) -> float:
    """Distance on the spherical suspension of ``link`` (range [0, pi])."""
    return float(suspension_paired_distance(link, p, q))


def suspension_paired_distance(link: LinkSpace, P, Q) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    t, s = P[..., 0], Q[..., 0]
    sep = np.minimum(link.paired_distance(P[..., 1:], Q[..., 1:]), math.pi)
    arg = np.cos(t) * np.cos(s) + np.sin(t) * np.sin(s) * np.cos(sep)
    return np.arccos(np.clip(arg, -1.0, 1.0))


def geodesic_hits_apex(link: LinkSpace, y, z) -> bool:
    """True when a through-tip path is among the minimizers.

    Tie-break: separation exactly pi counts as a hit.
    """
    return bool(link.distance(y, z) >= math.pi)


@dataclass
class UnfoldedGeodesic:
    """Minimizing geodesic on a flat cone, developed onto a planar sector."""

    angle: float
    plane_p: np.ndarray
    plane_q: np.ndarray
    length: float
    gap: float
    start_coord: float
    orientation: float
    circle: Circle = field(repr=False)

    def point_at(self, t) -> np.ndarray:
        """Constant-speed parametrization; t in [0, 1] maps p to q.

        Returns cone chart rows [r, s]; vectorized over t.
        """
        t = np.asarray(t, dtype=float)
        z = (1.0 - t)[..., None] * self.plane_p + t[..., None] * self.plane_q
        rho = np.linalg.norm(z, axis=-1)
        psi = np.arctan2(z[..., 1], z[..., 0])
        s = (self.start_coord + self.orientation * psi) % self.circle.length
        return np.stack([rho, s], axis=-1)

    def min_apex_distance(self) -> float:
        """Exact distance from the developed segment to the tip."""
        a, b = self.plane_p, self.plane_q
        seg = b - a
        denom = float(seg @ seg)
        if denom == 0.0:
            return float(np.linalg.norm(a))
        t = float(np.clip(-(a @ seg) / denom, 0.0, 1.0))
        return float(np.linalg.norm(a + t * seg))

    def polyline(self, k: int = 65) -> np.ndarray:
        """Sampled rows (t, r, s) for export."""
        t = np.linspace(0.0, 1.0, k)
        pts = self.point_at(t)
        return np.column_stack([t, pts])


def unfold_flat_cone(angle: float, p, q) -> UnfoldedGeodesic:
    """Develop the flat cone of total tip angle ``angle`` and join p to q.

    Requires the angular separation of p and q to be below pi; at or above
    pi the minimizer passes through the tip and the caller must branch via
    ``geodesic_hits_apex``.
    """
    if angle <= 0:
        raise ValueError("cone angle must be positive")
    circle = Circle(angle / (2.0 * math.pi))
    rp, yp = _as_cone_arrays(p)
    rq, yq = _as_cone_arrays(q)
    sp, sq = float(np.ravel(yp)[0]), float(np.ravel(yq)[0])
    length_total = circle.length
    raw = (sq - sp) % length_total
    if raw <= length_total - raw:
        gap, orientation = raw, 1.0
    else:
        gap, orientation = length_total - raw, -1.0
    if gap >= math.pi:
        raise ValueError(
            "angular separation >= pi: the minimizer passes through the tip; "
            "use the two-segment tip path")
    plane_p = np.array([float(rp), 0.0])
    plane_q = float(rq) * np.array([math.cos(gap), math.sin(gap)])
    length = float(np.linalg.norm(plane_q - plane_p))
    return UnfoldedGeodesic(
        angle=angle, plane_p=plane_p, plane_q=plane_q, length=length,
        gap=gap, start_coord=sp, orientation=orientation, circle=circle)


@dataclass
class PolygonalCurve:
    """Piecewise-geodesic curve given by its vertex chart coordinates."""

    model: object
    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)

    def segment_lengths(self) -> np.ndarray:
        P = self.points
        return self.model.paired_distance(P[:-1], P[1:])

    def length(self) -> float:
        return float(np.sum(self.segment_lengths()))


def perturb_curve_off_singular(curve: PolygonalCurve, eps: float) -> PolygonalCurve:
    """Reroute a curve around the single singular vertex it passes through.

    Works on 2-dimensional cone and suspension models (circle link).  The
    detour replaces the singular vertex by an arc at radius delta chosen so
    the added arc length is at most ``eps``; delta is linear in ``eps``, so
    halving eps halves the detour radius.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    model = curve.model
    radial, circle = model.polar_chart()

    pts = [np.asarray(p, dtype=float) for p in curve.points]
    singular = [i for i, p in enumerate(pts) if _is_singular_vertex(p, radial)]
    if not singular:
        return curve
    if len(singular) > 1:
        raise ValueError("curve passes through the singular set more than once")
    i = singular[0]
    if i == 0 or i == len(pts) - 1:
        raise ValueError("singular endpoint cannot be rerouted")

    before, vertex, after = pts[i - 1], pts[i], pts[i + 1]
    gap = float(circle.paired_distance(before[1:], after[1:]))
    r_min = min(_radial_gap(before[0], vertex[0], radial),
                _radial_gap(after[0], vertex[0], radial))
    delta = eps / (2.0 * max(gap, 1.0))
    if delta >= r_min:
        raise ValueError("eps too large: detour radius would swallow a segment")

    arc = _arc_points(circle, before[1:], after[1:],
                      _shift_radial(vertex[0], delta, radial))
    new_pts = np.asarray(pts[:i] + arc + pts[i + 1:], dtype=float)
    return PolygonalCurve(model=model, points=new_pts)


def _is_singular_vertex(p, radial):
    if radial == "cone":
        return p[0] <= 0.0
    return p[0] <= 0.0 or p[0] >= math.pi


def _radial_gap(r, vertex_r, radial):
    if radial == "cone":
        return r
    pole = 0.0 if vertex_r <= 0.0 else math.pi
    return abs(r - pole)


def _shift_radial(vertex_r, delta, radial):
    if radial == "cone" or vertex_r <= 0.0:
        return delta
    return math.pi - delta


def _arc_points(circle, y_from, y_to, radius):
    s0, s1 = float(y_from[0]), float(y_to[0])
    length_total = circle.length
    raw = (s1 - s0) % length_total
    if raw <= length_total - raw:
        gap, orientation = raw, 1.0
    else:
        gap, orientation = length_total - raw, -1.0
    k = max(2, int(math.ceil(gap / 0.05)) + 1)
    s = (s0 + orientation * np.linspace(0.0, gap, k)) % length_total
    return [np.array([radius, si]) for si in s]


def comparison_angle(k: float, d_pa: float, d_pb: float, d_ab: float) -> float:
    """Angle at the hinge of the k-model triangle with the given side lengths."""
    if d_pa <= 0 or d_pb <= 0:
        raise ValueError("comparison angle needs nondegenerate sides at the hinge")
    if d_ab > d_pa + d_pb + 1e-9:
        raise MetricConsistencyError(
            f"triangle inequality violated: {d_ab} > {d_pa} + {d_pb}")
    if abs(k) < 1e-15:
        num = d_pa * d_pa + d_pb * d_pb - d_ab * d_ab
        cosv = num / (2.0 * d_pa * d_pb)
    elif k > 0:
        s = math.sqrt(k)
        denom = math.sin(s * d_pa) * math.sin(s * d_pb)
        if denom == 0.0:
            raise ValueError("side of length pi/sqrt(k): comparison angle undefined")
        cosv = (math.cos(s * d_ab) - math.cos(s * d_pa) * math.cos(s * d_pb)) / denom
    else:
        s = math.sqrt(-k)
        denom = math.sinh(s * d_pa) * math.sinh(s * d_pb)
        cosv = (math.cosh(s * d_pa) * math.cosh(s * d_pb) - math.cosh(s * d_ab)) / denom
    return math.acos(min(1.0, max(-1.0, cosv)))


def quadruple_comparison(model, p, a, b, c, k: float,
                         tol: float = 1e-9, seed=None) -> CheckReport:
    """1+3-point comparison: the three hinge angles at p must sum to <= 2*pi."""
    pts = {"a": a, "b": b, "c": c}
    d_center = {key: model.distance(p, val) for key, val in pts.items()}
    pair_names = [("a", "b"), ("b", "c"), ("a", "c")]
    angles = {}
    for u, v in pair_names:
        d_uv = model.distance(pts[u], pts[v])
        angles[u + v] = comparison_angle(k, d_center[u], d_center[v], d_uv)
    total = sum(angles.values())
    margin = 2.0 * math.pi - total
    return CheckReport.from_margin(
        name="quadruple_comparison",
        margin=margin,
        tolerance=tol,
        n_samples=4,
        seed=seed,
        diagnostics={"angle_sum": total, "angles": angles, "k": k,
                     "center_distances": d_center},
    )
