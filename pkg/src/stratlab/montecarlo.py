"""Measure-side numerics: reproducible sampling, volume estimates with
honest standard errors, density/doubling diagnostics, tube volumes, and
Minkowski-content ladders.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from . import cache
from .links import Circle, RoundSphere, Suspension, sin_power_integral, sphere_area
from .report import CheckReport
from .spaces import (
    EuclideanCone,
    FermiSphere,
    RoundSphereSpace,
    StratifiedModel,
    SuspensionSpace,
    TWO_PI,
)


@dataclass
class SampleCloud:
    """Weighted point cloud drawn from a model's volume measure."""

    model: StratifiedModel
    points: np.ndarray
    weights: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return len(self.points)

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def subset_volume(self, mask) -> tuple:
        """(estimate, stderr) for the volume of {i: mask_i}."""
        mask = np.asarray(mask, dtype=bool)
        x = self.n * self.weights * mask
        est = float(x.mean())
        se = float(x.std(ddof=1) / math.sqrt(self.n)) if self.n > 1 else 0.0
        return est, se

    def distances_from(self, x) -> np.ndarray:
        return self.model.distances_from(x, self.points)


def sample_points(model: StratifiedModel, n: int, seed: int,
                  use_cache: bool = True) -> SampleCloud:
    """Draw n points from the model's normalized volume sampler.

    Identical (model, n, seed) always yields an identical cloud.
    """
    if n <= 0:
        raise ValueError("sample size must be positive")
    if use_cache:
        hit = cache.load_cloud(model, n, seed)
        if hit is not None:
            return SampleCloud(model, hit[0], hit[1], seed)
    rng = np.random.default_rng(np.random.PCG64(seed))
    pts, w = model.sample(n, rng)
    if use_cache:
        cache.store_cloud(model, n, seed, pts, w)
    return SampleCloud(model, pts, w, seed)


def total_volume_mc(model: StratifiedModel, n: int, seed: int) -> tuple:
    """(estimate, stderr) of the total volume from a coordinate-uniform
    proposal, so the standard error is a real Monte Carlo error."""
    rng = np.random.default_rng(np.random.PCG64(seed))
    _, w = model.proposal_sample(n, rng)
    x = n * w
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(n))


def ball_volume_mc(model: StratifiedModel, center, radius: float,
                   n: int = 100_000, seed: int = 0,
                   cloud: Optional[SampleCloud] = None) -> tuple:
    """(estimate, stderr) of vol(B(center, radius)) by cloud counting."""
    if cloud is None:
        cloud = sample_points(model, n, seed)
    center = model.check_point(np.asarray(center, dtype=float))
    d = cloud.distances_from(center)
    return cloud.subset_volume(d <= radius)


def model_ball_volume(model: StratifiedModel, radius: float) -> float:
    """Volume of the ball about the model's distinguished center point
    (cone apex, suspension/sphere pole) by radial quadrature."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if isinstance(model, EuclideanCone):
        r = min(radius, model.radius)
        val, _ = integrate.quad(lambda s: s ** model.link.dim, 0.0, r,
                                epsrel=1e-10, epsabs=1e-14)
        return model.link.volume() * val
    if isinstance(model, (SuspensionSpace, RoundSphereSpace)):
        cap = math.pi
        if radius > cap:
            warnings.warn(
                f"radius {radius} exceeds the diameter bound pi; clamping")
            radius = cap
        if isinstance(model, SuspensionSpace):
            shell = model.link.volume()
            m = model.link.dim
        else:
            shell = sphere_area(model.dim - 1)
            m = model.dim - 1
        val, _ = integrate.quad(lambda t: math.sin(t) ** m, 0.0, radius,
                                epsrel=1e-10, epsabs=1e-14)
        return shell * val
    raise ValueError(f"no distinguished center for family {model.family}")


# ---------------------------------------------------------------------------
# Density regularity and doubling


def ahlfors_profile(model: StratifiedModel, cloud: SampleCloud,
                    n_centers: int = 20, radii=None, seed: int = 7) -> dict:
    """Density quotients vol(B_r(x))/r^dim over random centers and radii."""
    if radii is None:
        top = min(model.diameter() / 4.0, 1.0)
        radii = top * 2.0 ** -np.arange(3)
    rng = np.random.default_rng(np.random.PCG64(seed))
    idx = rng.choice(cloud.n, size=min(n_centers, cloud.n), replace=False)
    dim = model.dim
    quotients = []
    for i in idx:
        d = cloud.distances_from(cloud.points[i])
        for r in radii:
            v, _ = cloud.subset_volume(d <= r)
            quotients.append(v / r ** dim)
    q = np.array(quotients)
    if np.any(q <= 0):
        raise RuntimeError("empty ball encountered; cloud too sparse")
    return {
        "quotients": q,
        "upper": float(q.max()),
        "lower": float(q.min()),
        "ratio": float(q.max() / q.min()),
        "radii": np.asarray(radii, dtype=float),
        "centers": idx,
    }


def ahlfors_check(model: StratifiedModel, cloud: SampleCloud,
                  n_centers: int = 20, ratio_cap: float = 50.0,
                  seed: int = 7) -> CheckReport:
    """Pass when the density quotient stays within a finite two-sided band."""
    prof = ahlfors_profile(model, cloud, n_centers=n_centers, seed=seed)
    margin = ratio_cap - prof["ratio"]
    return CheckReport.from_margin(
        name="ahlfors_regularity",
        margin=margin,
        tolerance=0.0,
        n_samples=cloud.n,
        seed=cloud.seed,
        diagnostics={"ratio": prof["ratio"], "upper": prof["upper"],
                     "lower": prof["lower"], "model": model.model_hash()},
    )


def doubling_check(model: StratifiedModel, center, radius: float,
                   cloud: SampleCloud, expected: float = 4.0,
                   n_sigma: float = 3.0) -> CheckReport:
    """Volume doubling v(2r)/v(r) against its exact value, within MC error."""
    center = np.asarray(center, dtype=float)
    d = cloud.distances_from(center)
    v1, se1 = cloud.subset_volume(d <= radius)
    v2, se2 = cloud.subset_volume(d <= 2.0 * radius)
    if v1 <= 0:
        raise RuntimeError("inner ball captured no samples")
    ratio = v2 / v1
    se = ratio * math.sqrt((se1 / v1) ** 2 + (se2 / v2) ** 2)
    margin = n_sigma * se - abs(ratio - expected)
    return CheckReport.from_margin(
        name="volume_doubling",
        margin=margin,
        tolerance=0.0,
        n_samples=cloud.n,
        seed=cloud.seed,
        diagnostics={"ratio": ratio, "stderr": se, "expected": expected,
                     "radius": radius},
    )


# ---------------------------------------------------------------------------
# Tube volumes around the singular set


def tubular_volume(model: StratifiedModel, eps: float,
                   cloud: Optional[SampleCloud] = None,
                   n: int = 200_000, seed: int = 3) -> tuple:
    """(volume of the eps-tube around the singular set, stderr).

    Exact closed forms and quadratures return stderr 0.
    """
    if eps <= 0:
        raise ValueError("tube radius must be positive")
    if isinstance(model, RoundSphereSpace):
        return 0.0, 0.0
    if isinstance(model, EuclideanCone) and isinstance(model.link, Circle):
        r = min(eps, model.radius)
        alpha = TWO_PI * model.link.radius
        return 0.5 * alpha * r * r, 0.0
    if isinstance(model, SuspensionSpace) and isinstance(model.link, Circle):
        a = model.link.radius
        if abs(a - 1.0) < 1e-12:
            return 0.0, 0.0
        t = min(eps, math.pi / 2)
        return 2.0 * (TWO_PI * a) * (1.0 - math.cos(t)), 0.0
    if (isinstance(model, SuspensionSpace)
            and isinstance(model.link, Suspension)
            and isinstance(model.link.base, Circle)):
        a = model.link.base.radius
        if abs(a - 1.0) < 1e-12:
            return 0.0, 0.0
        ce2 = math.cos(min(eps, math.pi / 2)) ** 2

        def shell(t):
            st2 = math.sin(t) ** 2
            ct2 = math.cos(t) ** 2
            if st2 < 1e-300 or ct2 >= ce2:
                frac = 2.0
            else:
                q = (ce2 - ct2) / st2
                if q >= 1.0:
                    return 0.0
                frac = 2.0 * (1.0 - math.sqrt(q))
            return math.sin(t) ** 2 * frac

        val, _ = integrate.quad(shell, 0.0, math.pi, epsrel=1e-10,
                                epsabs=1e-14, limit=200)
        return TWO_PI * a * val, 0.0
    if isinstance(model, FermiSphere):
        from .spaces import fermi_chart_limit, fermi_theta_component
        if eps >= fermi_chart_limit(model.beta):
            raise ValueError("tube radius exceeds the chart validity range")
        rng = np.random.default_rng(np.random.PCG64(seed))
        r = rng.uniform(0.0, eps, n)
        phi = rng.uniform(0.0, TWO_PI, n)
        g_tt = fermi_theta_component(model.beta, r, phi)
        f = (np.sqrt(model.angular_factor_sq(r)) * np.sin(r)
             * np.sqrt(np.maximum(g_tt, 0.0)))
        scale = eps * TWO_PI * TWO_PI
        return (scale * float(f.mean()),
                scale * float(f.std(ddof=1) / math.sqrt(n)))
    if cloud is None:
        cloud = sample_points(model, n, seed)
    d = model.singular_distance(cloud.points)
    return cloud.subset_volume(d <= eps)


# ---------------------------------------------------------------------------
# Minkowski content


@dataclass(frozen=True)
class BallRegion:
    """Metric ball about a model's distinguished center."""

    radius: float


@dataclass(frozen=True)
class SuspensionCap:
    """Sublevel region {height < t_max} of a suspension coordinate."""

    t_max: float


def region_enlarged_volume(model: StratifiedModel, region, eps: float) -> float:
    """Exact volume of the closed eps-enlargement of the region."""
    if eps < 0:
        raise ValueError("enlargement must be nonnegative")
    if isinstance(region, BallRegion):
        return model_ball_volume(model, region.radius + eps)
    if isinstance(region, SuspensionCap):
        if isinstance(model, SuspensionSpace):
            shell = model.link.volume()
            m = model.link.dim
        elif isinstance(model, RoundSphereSpace):
            shell = sphere_area(model.dim - 1)
            m = model.dim - 1
        else:
            raise ValueError("cap regions need a height coordinate")
        t = float(np.clip(region.t_max + eps, 0.0, math.pi))
        val, _ = integrate.quad(lambda s: math.sin(s) ** m, 0.0, t,
                                epsrel=1e-10, epsabs=1e-14)
        return shell * val
    raise ValueError(f"unsupported region type {type(region).__name__}")


def minkowski_profile(model: StratifiedModel, region, eps_ladder) -> dict:
    """Perimeter estimates (vol(E^eps) - vol(E)) / eps along a decreasing
    ladder, with one-step linear extrapolation to eps -> 0."""
    ladder = np.asarray(eps_ladder, dtype=float)
    if ladder.ndim != 1 or len(ladder) < 2:
        raise ValueError("ladder needs at least two levels")
    if np.any(ladder <= 0) or np.any(np.diff(ladder) >= 0):
        raise ValueError("ladder must be positive and strictly decreasing")
    base = region_enlarged_volume(model, region, 0.0)
    quotients = np.array([
        (region_enlarged_volume(model, region, e) - base) / e for e in ladder
    ])
    extrapolated = []
    for i in range(len(ladder) - 1):
        e0, e1 = ladder[i], ladder[i + 1]
        q0, q1 = quotients[i], quotients[i + 1]
        extrapolated.append((q0 * e1 - q1 * e0) / (e1 - e0))
    extrapolated = np.array(extrapolated)
    return {
        "ladder": ladder,
        "quotients": quotients,
        "extrapolated": extrapolated,
        "content": float(extrapolated.min()),
        "volume": base,
    }


def minkowski_content(model: StratifiedModel, region, eps_ladder) -> float:
    """Lower Minkowski-content estimate of the region's boundary."""
    return minkowski_profile(model, region, eps_ladder)["content"]
