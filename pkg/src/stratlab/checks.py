"""Verification suite: volume comparison, Laplacian comparison, isoperimetry,
cutoff families, the weak Bochner inequality, measure-contraction densities,
and geodesic-convexity statistics.

Every check returns a CheckReport whose margin is signed so that
``margin >= -tolerance`` means pass; diagnostics carry the raw numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .cones import unfold_flat_cone
from .links import Circle, Suspension, sphere_area, sin_power_integral
from .montecarlo import (
    BallRegion,
    SampleCloud,
    SuspensionCap,
    minkowski_profile,
    sample_points,
)
from .report import CheckReport
from .spaces import (
    EuclideanCone,
    FermiSphere,
    RoundSphereSpace,
    StratifiedModel,
    SuspensionSpace,
    TWO_PI,
)
from .spectral import (DiscreteGraph, SpectralData, build_graph, kernel_mass,
                       spectrum)


# ---------------------------------------------------------------------------
# Space-form reference quantities


def _curv_scale(K: float, N: float) -> float:
    if N <= 1:
        raise ValueError("effective dimension must exceed 1")
    return K / (N - 1.0)


def snk(k: float, t):
    t = np.asarray(t, dtype=float)
    if k > 0:
        s = math.sqrt(k)
        return np.sin(s * t) / s
    if k < 0:
        s = math.sqrt(-k)
        return np.sinh(s * t) / s
    return t


def cotk(k: float, t):
    """sn_k'(t)/sn_k(t): the mean-curvature comparison profile."""
    t = np.asarray(t, dtype=float)
    if k > 0:
        s = math.sqrt(k)
        return s * np.cos(s * t) / np.sin(s * t)
    if k < 0:
        s = math.sqrt(-k)
        return s * np.cosh(s * t) / np.sinh(s * t)
    return 1.0 / t


def space_form_ball_volume(K: float, N: int, r: float) -> float:
    """Ball volume in the N-dimensional simply connected space of constant
    curvature K/(N-1)."""
    k = _curv_scale(K, N)
    if k > 0:
        r = min(r, math.pi / math.sqrt(k))
    val, _ = integrate.quad(lambda t: snk(k, t) ** (N - 1), 0.0, r,
                            epsrel=1e-10, epsabs=1e-14)
    return sphere_area(N - 1) * val


# ---------------------------------------------------------------------------
# Bishop-Gromov volume monotonicity


def bishop_gromov_check(model: StratifiedModel, cloud: SampleCloud,
                        K: Optional[float] = None, N: Optional[int] = None,
                        n_centers: int = 20, radii=None,
                        n_sigma: float = 3.0, seed: int = 11,
                        centers=None) -> CheckReport:
    """Monotonicity of r -> vol(B_r(x)) / v_{K,N}(r) over sampled centers.

    Pairwise comparisons pass when any increase stays within n_sigma combined
    standard errors.
    """
    if K is None:
        K = model.ricci_lower_bound()
        if K is None:
            raise ValueError("model has no analytic curvature bound; pass K")
    if N is None:
        N = model.dim
    if radii is None:
        top = model.diameter() / 2.0
        radii = top * 2.0 ** -np.arange(4, -1, -1.0)
    radii = np.sort(np.asarray(radii, dtype=float))
    if centers is None:
        rng = np.random.default_rng(np.random.PCG64(seed))
        idx = rng.choice(cloud.n, size=min(n_centers, cloud.n), replace=False)
        centers = cloud.points[idx]
    centers = np.asarray(centers, dtype=float)
    ref = np.array([space_form_ball_volume(K, N, r) for r in radii])
    worst = np.inf
    worst_pair = None
    ratios_all, errs_all = [], []
    for c in centers:
        d = cloud.distances_from(c)
        ratios, errs = [], []
        for r, v_ref in zip(radii, ref):
            v, se = cloud.subset_volume(d <= r)
            ratios.append(v / v_ref)
            errs.append(se / v_ref)
        ratios_all.append(ratios)
        errs_all.append(errs)
        for i in range(len(radii)):
            for j in range(i + 1, len(radii)):
                se = math.hypot(errs[i], errs[j])
                slack = ratios[i] - ratios[j] + n_sigma * se
                if slack < worst:
                    worst = slack
                    worst_pair = (i, j, ratios[i], ratios[j], se)
    return CheckReport.from_margin(
        name="bishop_gromov",
        margin=float(worst),
        tolerance=0.0,
        n_samples=cloud.n,
        seed=cloud.seed,
        diagnostics={
            "K": K, "N": N, "radii": radii.tolist(),
            "ratios": np.asarray(ratios_all).tolist(),
            "stderr": np.asarray(errs_all).tolist(),
            "worst_pair": worst_pair,
            "n_sigma": n_sigma,
        },
    )


def exact_cone_ball_area(angle: float, center_apex_distance: float,
                         r) -> np.ndarray:
    """Area of B_r(x) on the infinite cone of total angle >= 2*pi, where x
    sits at the given distance from the apex.  Below that distance the ball
    is flat; past it the extra angular sector contributes."""
    if angle < TWO_PI:
        raise ValueError("closed form stated for angle >= 2*pi")
    r = np.asarray(r, dtype=float)
    d = center_apex_distance
    extra = np.where(r > d, 0.5 * (angle - TWO_PI) * (r - d) ** 2, 0.0)
    return math.pi * r ** 2 + extra


# ---------------------------------------------------------------------------
# Laplacian comparison for distance functions


def laplacian_comparison_check(model: StratifiedModel, graph: DiscreteGraph,
                               center, K: Optional[float] = None,
                               N: Optional[int] = None,
                               n_bins: int = 20, tol_mult: float = 5.0,
                               mode: str = "lower",
                               min_bin_count: int = 25) -> CheckReport:
    """Binned comparison of the graph Laplacian of d(center, .) against the
    space-form profile -(N-1) cot_k(d).

    mode "lower" checks L d >= profile (the one-sided comparison); mode
    "equality" checks agreement in absolute value.  Masked out: kernel-scale
    neighborhoods of the center, the far half near the diameter, points where
    the discrete gradient of d is degenerate, and the singular tube.
    """
    if K is None:
        K = model.ricci_lower_bound()
        if K is None:
            raise ValueError("model has no analytic curvature bound; pass K")
    if N is None:
        N = model.dim
    if mode not in ("lower", "equality"):
        raise ValueError("mode must be 'lower' or 'equality'")
    cloud = graph.cloud
    eps = graph.eps
    center = np.asarray(center, dtype=float)
    d = cloud.distances_from(center)
    lap = graph.apply_laplacian(d)
    grad = graph.gradient_norm(d)
    diam = model.diameter()
    sing = model.singular_distance(cloud.points)
    mask = ((d <= 4.0 * eps)
            | (2.0 * d >= diam - 5.0 * eps)
            | (grad < 1.0 - 10.0 * eps)
            | (sing <= 2.0 * eps))
    keep = ~mask
    if keep.sum() < 10 * min_bin_count:
        raise ValueError(
            "mask removed nearly all points; reduce eps or enlarge the cloud")
    k = _curv_scale(K, N)
    rhs = -(N - 1.0) * cotk(k, d[keep])
    lhs = lap[keep]
    dk = d[keep]
    edges = np.linspace(dk.min(), dk.max() * (1 + 1e-12), n_bins + 1)
    which = np.digitize(dk, edges) - 1
    margins, tols, table = [], [], []
    for b in range(n_bins):
        sel = which == b
        cnt = int(sel.sum())
        if cnt < min_bin_count:
            continue
        diff = lhs[sel] - rhs[sel]
        mean = float(diff.mean())
        se = float(diff.std(ddof=1) / math.sqrt(cnt))
        rmean = float(rhs[sel].mean())
        tol = tol_mult * (eps * (1.0 + abs(rmean)) + se)
        val = tol - abs(mean) if mode == "equality" else mean + tol
        margins.append(val)
        tols.append(tol)
        table.append({"d": float(dk[sel].mean()), "count": cnt,
                      "mean_diff": mean, "stderr": se, "tol": tol})
    if not margins:
        raise ValueError("no bin collected enough points")
    worst = int(np.argmin(margins))
    return CheckReport.from_margin(
        name=f"laplacian_comparison_{mode}",
        margin=float(margins[worst]),
        tolerance=0.0,
        n_samples=cloud.n,
        seed=cloud.seed,
        diagnostics={"K": K, "N": N, "eps": eps, "bins": table,
                     "masked_fraction": float(mask.mean()), "mode": mode},
    )


# ---------------------------------------------------------------------------
# Levy-Gromov isoperimetry


def levy_gromov_bound(fraction: float, n: int) -> float:
    """Sharp normalized isoperimetric profile of the round n-sphere."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("volume fraction must lie in [0, 1]")
    if fraction in (0.0, 1.0):
        return 0.0
    total = sin_power_integral(n - 1)

    def cap(t):
        val, _ = integrate.quad(lambda s: math.sin(s) ** (n - 1), 0.0, t,
                                epsrel=1e-12, epsabs=1e-14)
        return val / total - fraction

    t_beta = optimize.brentq(cap, 1e-12, math.pi - 1e-12, xtol=1e-12)
    return (sphere_area(n - 1) * math.sin(t_beta) ** (n - 1)
            / sphere_area(n))


def levy_gromov_check(model: StratifiedModel, region, eps_ladder,
                      mode: str = "lower", rel_tol: float = 0.02) -> CheckReport:
    """Isoperimetric comparison of a region's Minkowski perimeter against the
    round-sphere profile at the region's volume fraction."""
    prof = minkowski_profile(model, region, eps_ladder)
    vol = model.volume()
    fraction = prof["volume"] / vol
    p_hat = prof["content"] / vol
    bound = levy_gromov_bound(fraction, model.dim)
    if mode == "equality":
        margin = rel_tol * max(bound, 1e-12) - abs(p_hat - bound)
    elif mode == "lower":
        margin = p_hat - bound + rel_tol * max(bound, 1e-12)
    else:
        raise ValueError("mode must be 'lower' or 'equality'")
    return CheckReport.from_margin(
        name=f"levy_gromov_{mode}",
        margin=float(margin),
        tolerance=0.0,
        diagnostics={"fraction": fraction, "perimeter": p_hat,
                     "bound": bound, "ladder": list(map(float, eps_ladder)),
                     "region": type(region).__name__},
    )


# ---------------------------------------------------------------------------
# Cutoff families around the singular set


def cutoff_rho(eps: float):
    """The logarithmic cutoff profile: 0 inside d <= eps^2, 1 outside
    d >= eps, log-linear between."""
    if not 0.0 < eps < 1.0:
        raise ValueError("cutoff scale must lie in (0, 1)")
    log_inv = math.log(1.0 / eps)

    def rho(d):
        d = np.asarray(d, dtype=float)
        safe = np.maximum(d, 1e-300)
        return np.clip(np.log(safe / eps ** 2) / log_inv, 0.0, 1.0)

    return rho


@dataclass
class CutoffData:
    eps: float
    dirichlet: float
    l1_laplacian: float
    n_nodes: int
    method: str


def cutoff_family(model: StratifiedModel, eps: float, n: int = 4000,
                  seed: int = 5, graph: Optional[DiscreteGraph] = None
                  ) -> CutoffData:
    """Discrete energies of the logarithmic cutoff around the singular set.

    For flat cones over circles the Dirichlet form is evaluated on the
    conformally equivalent flat strip (2d Dirichlet energy and the L1 norm
    of the Laplacian are conformal invariants), which resolves the full
    annulus eps^2 < d < eps at any eps.  Other models use a kernel graph on
    the model itself.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("cutoff scale must lie in (0, 1)")
    if eps >= model.cutoff_scale:
        raise ValueError(
            f"cutoff scale {eps} is not below the model's resolvable "
            f"scale {model.cutoff_scale}")
    strata = model.strata()
    effective = [s for s in strata
                 if s.angle is None or abs(s.angle - TWO_PI) > 1e-12]
    if not effective:
        return CutoffData(eps, 0.0, 0.0, 0, "constant")
    if isinstance(model, EuclideanCone) and isinstance(model.link, Circle):
        return _strip_cutoff(model, eps, n, seed)
    if graph is None:
        cloud = sample_points(model, n, seed)
        graph = build_graph(cloud, max(eps / 3.0, 0.02))
    rho = cutoff_rho(eps)(model.singular_distance(graph.cloud.points))
    scale = model.volume() / float(graph.measure.sum())
    dirichlet = scale * graph.inner(rho, graph.apply_laplacian(rho))
    l1 = scale * float(np.sum(graph.measure
                              * np.abs(graph.apply_laplacian(rho))))
    return CutoffData(eps, float(dirichlet), float(l1), graph.n, "graph")


def _strip_cutoff(model: EuclideanCone, eps: float, n: int, seed: int
                  ) -> CutoffData:
    alpha = TWO_PI * model.link.radius
    u_lo, u_hi = 2.0 * math.log(eps), math.log(eps)
    h = max(0.12, (u_hi - u_lo) / 18.0)
    pad = 6.0 * h
    lo, hi = u_lo - pad, u_hi + pad
    area = alpha * (hi - lo)
    n_eff = max(n, int(area / (h / 2.2) ** 2))
    rng = np.random.default_rng(np.random.PCG64(seed))
    u = rng.uniform(lo, hi, n_eff)
    th = rng.uniform(0.0, alpha, n_eff)
    w = np.full(n_eff, area / n_eff)
    log_inv = math.log(1.0 / eps)
    rho = np.clip((u - u_lo) / log_inv, 0.0, 1.0)
    # kernel graph on the flat strip (theta periodic with period alpha),
    # assembled in row blocks to bound memory at O(block * n)
    nu = kernel_mass(2, h)
    wrho = w * rho
    lap = np.empty(n_eff)
    block = max(1, int(2e7 // n_eff))
    for start in range(0, n_eff, block):
        stop = min(start + block, n_eff)
        du = u[start:stop, None] - u[None, :]
        dth = np.abs(th[start:stop, None] - th[None, :])
        dth = np.minimum(dth, alpha - dth)
        d2 = du ** 2 + dth ** 2
        K = np.exp(-d2 / (4.0 * h * h))
        K[d2 > (4.0 * h) ** 2] = 0.0
        lap[start:stop] = (K @ w) * rho[start:stop] - K @ wrho
    lap /= h * h * nu
    dirichlet = float(np.sum(w * rho * lap))
    l1 = float(np.sum(w * np.abs(lap)))
    return CutoffData(eps, dirichlet, l1, n_eff, "conformal_strip")


def cutoff_energy_oracle(model: StratifiedModel, eps: float) -> float:
    """Closed-form Dirichlet energy of the cutoff on a flat cone."""
    if not (isinstance(model, EuclideanCone) and isinstance(model.link, Circle)):
        raise ValueError("closed form available for circle cones only")
    alpha = TWO_PI * model.link.radius
    return alpha / math.log(1.0 / eps)


def cutoff_ladder_check(model: StratifiedModel, eps_top: float = 0.2,
                        steps: int = 4, n: int = 4000, seed: int = 5,
                        rel_tol: float = 0.10) -> CheckReport:
    """Halving ladder of cutoff energies: match the flat-cone closed form
    within rel_tol and decrease along the ladder."""
    ladder = [eps_top * 0.5 ** i for i in range(steps)]
    rows = []
    worst = np.inf
    prev = None
    for e in ladder:
        data = cutoff_family(model, e, n=n, seed=seed)
        oracle = cutoff_energy_oracle(model, e)
        rel = abs(data.dirichlet - oracle) / oracle
        worst = min(worst, rel_tol - rel)
        if prev is not None:
            worst = min(worst, prev - data.dirichlet)
        rows.append({"eps": e, "dirichlet": data.dirichlet,
                     "oracle": oracle, "l1_laplacian": data.l1_laplacian,
                     "nodes": data.n_nodes})
        prev = data.dirichlet
    return CheckReport.from_margin(
        name="cutoff_family",
        margin=float(worst),
        tolerance=0.0,
        seed=seed,
        diagnostics={"ladder": rows, "rel_tol": rel_tol},
    )


# ---------------------------------------------------------------------------
# Weak Bochner inequality


def bochner_check(data: SpectralData, f, psi=None, K: float = None,
                  N: float = None, tol_mult: float = 5.0,
                  label: str = "") -> CheckReport:
    """Weak Bochner margin  <Gamma2(f), psi> - K <Gamma(f), psi>
    - (1/N) <(Lf)^2, psi>  for a nonnegative test function psi.

    Gamma2 is assembled from the graph operators only:
    Gamma2(f) = -(1/2) L Gamma(f) + Gamma(f, Lf).
    """
    if K is None or N is None:
        raise ValueError("Bochner check needs explicit curvature parameters")
    if N <= 0:
        raise ValueError("effective dimension must be positive")
    g = data.graph
    f = np.asarray(f, dtype=float)
    if psi is None:
        psi = np.ones(g.n)
    psi = np.asarray(psi, dtype=float)
    if np.any(psi < 0):
        raise ValueError("test function psi must be nonnegative")
    gam = g.gamma(f)
    lf = g.apply_laplacian(f)
    gamma2 = -0.5 * g.apply_laplacian(gam) + g.gamma(f, lf)
    lhs = g.inner(gamma2, psi)
    rhs = K * g.inner(gam, psi) + g.inner(lf * lf, psi) / N
    margin = lhs - rhs
    tol = tol_mult * g.eps * (abs(lhs) + abs(rhs)) + 1e-12
    return CheckReport.from_margin(
        name=f"bochner{('_' + label) if label else ''}",
        margin=float(margin),
        tolerance=float(tol),
        n_samples=g.n,
        seed=g.cloud.seed,
        diagnostics={"lhs": lhs, "rhs": rhs, "K": K, "N": N,
                     "eps": g.eps, "dirichlet": g.inner(gam, np.ones(g.n))},
    )


def eigen_test_functions(data: SpectralData, count: int = 4):
    """Nonnegative test functions from shifted, clipped eigenfunctions."""
    out = [np.ones(data.graph.n)]
    for a in range(1, min(count, len(data.eigenvalues))):
        u = data.eigenfunctions[:, a]
        shifted = u - u.min() + 0.05 * (u.max() - u.min() + 1e-30)
        out.append(np.maximum(shifted, 0.0))
    return out


# ---------------------------------------------------------------------------
# Measure contraction toward a center


def _contract_cone(model: EuclideanCone, center, points, t: float):
    """Exact geodesic interpolation on a cone over a circle, center -> points
    at parameter t (t=1 is the identity)."""
    link = model.link
    if not isinstance(link, Circle):
        raise ValueError("contraction implemented for circle links")
    L = link.length
    c_r, c_s = float(center[0]), float(center[1])
    r, s = points[:, 0], points[:, 1]
    out = np.empty_like(points)
    if c_r <= 1e-12:
        out[:, 0] = t * r
        out[:, 1] = s
        return out
    raw = (s - c_s) % L
    # developing angle of the unfolded wedge equals the link arc distance
    gap = np.minimum(raw, L - raw)
    orient = np.where(raw <= L - raw, 1.0, -1.0)
    hits = gap >= math.pi
    # two-segment paths through the apex
    tot = c_r + r
    pos = t * tot
    first = pos <= c_r
    out[hits & first, 0] = c_r - pos[hits & first]
    out[hits & first, 1] = c_s
    sec = hits & ~first
    out[sec, 0] = pos[sec] - c_r
    out[sec, 1] = s[sec]
    # unfolded chords elsewhere
    reg = ~hits
    px, py = c_r, 0.0
    qx = r[reg] * np.cos(gap[reg])
    qy = r[reg] * np.sin(gap[reg])
    xt = (1 - t) * px + t * qx
    yt = (1 - t) * py + t * qy
    rho = np.hypot(xt, yt)
    ang = np.arctan2(yt, xt)
    out[reg, 0] = rho
    out[reg, 1] = (c_s + orient[reg] * ang) % L
    return out


def contract_toward(model: StratifiedModel, center, points, t: float):
    """Geodesic contraction F_t with F_1 = identity, F_0 = center."""
    if not 0.0 < t <= 1.0:
        raise ValueError("contraction parameter must lie in (0, 1]")
    points = np.asarray(points, dtype=float)
    center = np.asarray(center, dtype=float)
    if isinstance(model, EuclideanCone):
        return _contract_cone(model, center, points, t)
    if isinstance(model, (RoundSphereSpace, FermiSphere)):
        dots = np.clip(points @ center, -1.0, 1.0)
        ang = np.arccos(dots)
        small = ang < 1e-12
        ang = np.where(small, 1e-12, ang)
        out = (np.sin((1 - t) * ang)[:, None] * center
               + np.sin(t * ang)[:, None] * points) / np.sin(ang)[:, None]
        return out / np.linalg.norm(out, axis=1, keepdims=True)
    raise ValueError(f"no contraction map for family {model.family}")


def _kde(model, pts, weights, eval_pts, h):
    dim = model.dim
    norm = (2.0 * math.pi * h * h) ** (dim / 2.0)
    out = np.empty(len(eval_pts))
    block = max(1, int(2e7 // max(len(pts), 1)))
    for start in range(0, len(eval_pts), block):
        stop = min(start + block, len(eval_pts))
        E = eval_pts[start:stop]
        d = model.paired_distance(
            np.broadcast_to(E[:, None, :], (stop - start, len(pts), E.shape[1])),
            np.broadcast_to(pts[None, :, :], (stop - start, len(pts), E.shape[1])))
        out[start:stop] = (np.exp(-d ** 2 / (2 * h * h)) @ weights) / norm
    return out


def _mean_nn_distance(model, pts, rng, k_sub: int = 200):
    idx = rng.choice(len(pts), size=min(k_sub, len(pts)), replace=False)
    sub = pts[idx]
    d = model.paired_distance(
        np.broadcast_to(sub[:, None, :], (len(sub), len(pts), pts.shape[1])),
        np.broadcast_to(pts[None, :, :], (len(sub), len(pts), pts.shape[1])))
    d[np.arange(len(sub)), idx] = np.inf
    return float(np.mean(d.min(axis=1)))


def mcp_density_check(model: StratifiedModel, center, n: int = 20000,
                      ts=(0.4, 0.6, 0.8, 1.0), band: float = 0.25,
                      N: Optional[int] = None, seed: int = 17,
                      n_eval: int = 250) -> CheckReport:
    """Pushforward density of the geodesic contraction versus the t^-N
    measure-contraction profile, ratio-calibrated at t = 1.

    The calibration constant is fitted at t = 1 (flagged in diagnostics);
    t = 0 is excluded by construction.
    """
    if N is None:
        N = model.dim
    cloud = sample_points(model, n, seed)
    pts, w = cloud.points, cloud.weights
    rng = np.random.default_rng(np.random.PCG64(seed + 1))
    d_center = model.distances_from(np.asarray(center, float), pts)
    lo, hi = np.quantile(d_center, [0.25, 0.70])
    pool = np.nonzero((d_center > lo) & (d_center < hi))[0]
    eval_idx = rng.choice(pool, size=min(n_eval, len(pool)), replace=False)
    h0 = 2.0 * _mean_nn_distance(model, pts, rng)
    base = _kde(model, pts, w, pts[eval_idx], h0)
    rows = []
    ratios_by_t = {}
    for t in sorted(ts):
        if t <= 0.0:
            raise ValueError("contraction parameter t=0 is excluded")
        moved = contract_toward(model, center, pts, t)
        ht = max(t * h0, 0.25 * h0)
        dens = _kde(model, moved, w, contract_toward(
            model, center, pts[eval_idx], t), ht)
        ratios = dens / (base / t ** N)
        ratios_by_t[t] = ratios
        rows.append({"t": t, "median_ratio": float(np.median(ratios))})
    if 1.0 not in ratios_by_t:
        raise ValueError("the ladder must contain t = 1 for calibration")
    C = float(np.median(ratios_by_t[1.0]))
    worst = np.inf
    for t, ratios in ratios_by_t.items():
        dev = float(np.quantile(np.abs(ratios / C - 1.0), 0.9))
        worst = min(worst, band - dev)
        for row in rows:
            if row["t"] == t:
                row["deviation_q90"] = dev
    return CheckReport.from_margin(
        name="mcp_density",
        margin=float(worst),
        tolerance=0.0,
        n_samples=n,
        seed=seed,
        diagnostics={"rows": rows, "band": band, "N": N,
                     "calibration": C, "fitted_at_t1": True},
    )


def apex_hit_fraction(model: StratifiedModel, n_pairs: int = 100_000,
                      seed: int = 23) -> dict:
    """Fraction of random geodesics forced through the cone apex (or the
    suspension poles), with the analytic value."""
    rng = np.random.default_rng(np.random.PCG64(seed))
    if isinstance(model, EuclideanCone):
        link = model.link
        y1 = link.sample(n_pairs, rng)
        y2 = link.sample(n_pairs, rng)
        hits = link.paired_distance(y1, y2) >= math.pi
        alpha = TWO_PI * link.circle_factors()[0] if link.circle_factors() else None
        expected = max(0.0, 1.0 - TWO_PI / alpha) if alpha else 0.0
    elif isinstance(model, SuspensionSpace):
        link = model.link
        y1 = link.sample(n_pairs, rng)
        y2 = link.sample(n_pairs, rng)
        hits = link.paired_distance(y1, y2) >= math.pi
        if isinstance(link, Circle):
            expected = max(0.0, 1.0 - 1.0 / link.radius)
        else:
            expected = 0.0
    else:
        raise ValueError("apex-hit statistics need a cone or suspension")
    p = float(hits.mean())
    se = math.sqrt(max(p * (1 - p), 1e-12) / n_pairs)
    return {"fraction": p, "stderr": se, "expected": expected,
            "n_pairs": n_pairs}


def fermi_hit_profile(model: FermiSphere, eps_ladder, n_pairs: int = 30_000,
                      seed: int = 29, eval_times=(0.5,)) -> dict:
    """Tube-hit fractions of geodesic interpolation points, per eps.

    For each random pair the connecting geodesic is evaluated at the fixed
    interior times; a pair counts as a hit when any evaluation point lies in
    the eps-tube of the marked circle.  Each time slice pushes the pair
    measure to a volume-absolutely-continuous measure (the midpoint of a
    uniform pair is exactly uniform), so the fraction scales like the tube
    volume, quadratically in eps for a codimension-two circle.  (The
    sup-over-time sweep statistic is different: a round geodesic approaches
    a fixed circle within eps with probability of order eps, one order
    lower.  Several evaluation times also tilt the fitted slope at coarse
    eps, where the slices strongly overlap.)
    """
    ladder = np.sort(np.asarray(eps_ladder, dtype=float))[::-1]
    rng = np.random.default_rng(np.random.PCG64(seed))
    v = rng.standard_normal((2 * n_pairs, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    P, Q = v[:n_pairs], v[n_pairs:]
    ang = np.arccos(np.clip(np.sum(P * Q, axis=1), -1.0, 1.0))
    sin_ang = np.where(np.sin(ang) > 1e-12, np.sin(ang), 1.0)
    min_d = np.full(n_pairs, np.inf)
    for t in eval_times:
        if not 0.0 < t < 1.0:
            raise ValueError("evaluation times must be interior to (0, 1)")
        pts = (np.sin((1.0 - t) * ang)[:, None] * P
               + np.sin(t * ang)[:, None] * Q) / sin_ang[:, None]
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        min_d = np.minimum(min_d, model.singular_distance(pts))
    fractions = np.array([(min_d < e).mean() for e in ladder])
    counts = np.array([(min_d < e).sum() for e in ladder])
    ok = fractions > 0
    if ok.sum() >= 2:
        slope = float(np.polyfit(np.log(ladder[ok]),
                                 np.log(fractions[ok]), 1)[0])
    else:
        slope = float("nan")
    return {"ladder": ladder.tolist(), "fractions": fractions.tolist(),
            "counts": counts.tolist(), "slope": slope, "n_pairs": n_pairs,
            "eval_times": list(eval_times)}


# ---------------------------------------------------------------------------
# Suite runner


def run_checks(model: StratifiedModel, config: dict) -> list:
    """Run the configured check names against one model.

    Config keys: seed (required), samples, eps, checks (list of names).
    """
    if "seed" not in config:
        raise ValueError("configuration must supply a seed")
    seed = int(config["seed"])
    n = int(config.get("samples", 20000))
    eps = float(config.get("eps", 0.1))
    names = config.get("checks")
    if names is None:
        names = default_checks(model)
    reports = []
    cloud = sample_points(model, n, seed)
    graph = None
    spec = None

    def need_graph():
        nonlocal graph
        if graph is None:
            graph = build_graph(cloud, eps)
        return graph

    def need_spectrum(k=8):
        nonlocal spec
        if spec is None:
            spec = spectrum(need_graph(), k=k)
        return spec

    for name in names:
        if name == "bishop_gromov":
            K = config.get("bg_K", model.ricci_lower_bound())
            K = 0.0 if K is None else float(K)
            kwargs = {}
            if "bg_N" in config:
                kwargs["N"] = config["bg_N"]
            if "bg_radii" in config:
                kwargs["radii"] = config["bg_radii"]
            if "bg_centers" in config:
                kwargs["centers"] = np.asarray(config["bg_centers"],
                                               dtype=float)
            reports.append(bishop_gromov_check(model, cloud, K=K,
                                               seed=seed + 1, **kwargs))
        elif name == "quadruple":
            reports.append(_quadruple_sweep(model, cloud, seed=seed + 2))
        elif name == "ahlfors":
            from .montecarlo import ahlfors_check
            reports.append(ahlfors_check(model, cloud, seed=seed + 3))
        elif name == "lichnerowicz":
            K = model.ricci_lower_bound()
            if K is None or K <= 0:
                continue
            reports.append(lichnerowicz_from(need_spectrum(), K, model.dim))
        elif name == "bochner":
            data = need_spectrum()
            K = model.ricci_lower_bound()
            K = 0.0 if K is None else K
            u = data.eigenfunctions[:, 1]
            reports.append(bochner_check(data, u, None, K=K, N=model.dim,
                                         label="lambda1"))
        elif name == "laplacian":
            center = _default_center(model)
            reports.append(laplacian_comparison_check(
                model, need_graph(), center))
        elif name == "levy_gromov":
            region = _default_region(model)
            if region is None:
                continue
            reports.append(levy_gromov_check(
                model, region, [0.2, 0.1, 0.05, 0.025]))
        elif name == "cutoff":
            if isinstance(model, EuclideanCone) and isinstance(model.link, Circle):
                reports.append(cutoff_ladder_check(model, seed=seed + 4))
            continue
        elif name == "mcp":
            center = _default_center(model)
            reports.append(mcp_density_check(model, center,
                                             n=min(n, 20000), seed=seed + 5))
        else:
            raise ValueError(f"unknown check name: {name!r}")
    return reports


def lichnerowicz_from(data: SpectralData, K: float, dim: int) -> CheckReport:
    from .spectral import lichnerowicz_check
    return lichnerowicz_check(data, K, dim)


def _default_center(model: StratifiedModel):
    for name in ("apex", "pole", "on_circle"):
        try:
            return model.named_point(name)
        except ValueError:
            continue
    raise ValueError("model exposes no distinguished center")


def _default_region(model: StratifiedModel):
    if isinstance(model, RoundSphereSpace):
        return BallRegion(math.pi / 2.0)
    if isinstance(model, SuspensionSpace):
        return SuspensionCap(math.pi / 2.0)
    return None


def _quadruple_sweep(model: StratifiedModel, cloud: SampleCloud,
                     n_quads: int = 200, seed: int = 2) -> CheckReport:
    """Worst comparison-angle margin over random quadruples."""
    from .cones import quadruple_comparison
    k = model.sectional_lower_bound()
    if k is None:
        raise ValueError("model has no analytic sectional bound")
    rng = np.random.default_rng(np.random.PCG64(seed))
    worst = None
    for _ in range(n_quads):
        idx = rng.choice(cloud.n, size=4, replace=False)
        p, a, b, c = cloud.points[idx]
        try:
            rep = quadruple_comparison(model, p, a, b, c, k)
        except ValueError:
            continue
        if worst is None or rep.margin < worst.margin:
            worst = rep
    if worst is None:
        raise RuntimeError("no admissible quadruple found")
    return worst


def default_checks(model: StratifiedModel) -> list:
    names = ["bishop_gromov", "ahlfors"]
    if model.sectional_lower_bound() is not None:
        names.append("quadruple")
    if isinstance(model, (RoundSphereSpace, SuspensionSpace)):
        names.append("levy_gromov")
    if isinstance(model, EuclideanCone) and isinstance(model.link, Circle):
        names.append("cutoff")
    return names
