"""Synthetic-curvature classification of the model catalog.

A model satisfies the lower Ricci condition RCD(K, N) exactly when its
dimension is at most N, the regular-set Ricci bound is at least K, and every
codimension-two cone angle is at most 2*pi.  The sectional analogue CBB(k)
replaces the Ricci bound with the regular-set sectional bound under the same
angle condition.  The classifier evaluates these conditions from the model's
analytic data and reports indeterminate when the regular bound is unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .links import Circle, RoundSphere, Suspension
from .report import CheckReport
from .spaces import (
    EuclideanCone,
    FermiSphere,
    RoundSphereSpace,
    StratifiedModel,
    SuspensionSpace,
    TWO_PI,
)

_ANGLE_TOL = 1e-12


@dataclass
class CurvatureVerdict:
    condition: str                    # "rcd" or "cbb"
    holds: Optional[bool]             # None when indeterminate
    K: float
    N: float
    dim_ok: bool
    angle_ok: bool
    regular_bound: Optional[float]
    reasons: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "condition": self.condition,
            "holds": self.holds,
            "K": self.K,
            "N": self.N,
            "dim_ok": self.dim_ok,
            "angle_ok": self.angle_ok,
            "regular_bound": self.regular_bound,
            "reasons": list(self.reasons),
            "diagnostics": dict(self.diagnostics),
        }


def _angle_condition(model: StratifiedModel):
    angles = [s.angle for s in model.strata()
              if s.codim == 2 and s.angle is not None]
    ok = all(a <= TWO_PI + _ANGLE_TOL for a in angles)
    return ok, angles


def classify(model: StratifiedModel, K: float, N: float,
             estimate_missing: bool = False) -> CurvatureVerdict:
    """Decide RCD(K, N) for the model from its analytic data."""
    if N <= 0:
        raise ValueError("effective dimension must be positive")
    dim_ok = model.dim <= N + 1e-12
    angle_ok, angles = _angle_condition(model)
    bound = model.ricci_lower_bound()
    reasons = []
    diagnostics = {"angles": angles, "dim": model.dim}
    if not dim_ok:
        reasons.append(f"dimension {model.dim} exceeds N={N}")
    if not angle_ok:
        reasons.append("a codimension-two cone angle exceeds 2*pi")
    if not dim_ok or not angle_ok:
        return CurvatureVerdict("rcd", False, K, N, dim_ok, angle_ok,
                                bound, reasons, diagnostics)
    if bound is None:
        if estimate_missing and isinstance(model, FermiSphere):
            est = model.ricci_blend_estimate()
            diagnostics["ricci_estimate"] = est
            diagnostics["estimate_only"] = True
        reasons.append("regular-set Ricci bound unknown for this metric")
        return CurvatureVerdict("rcd", None, K, N, dim_ok, angle_ok,
                                None, reasons, diagnostics)
    if bound >= K - 1e-12:
        return CurvatureVerdict("rcd", True, K, N, dim_ok, angle_ok,
                                bound, reasons, diagnostics)
    reasons.append(f"regular Ricci bound {bound} is below K={K}")
    return CurvatureVerdict("rcd", False, K, N, dim_ok, angle_ok,
                            bound, reasons, diagnostics)


def alexandrov_classify(model: StratifiedModel, k: float) -> CurvatureVerdict:
    """Decide the sectional lower bound CBB(k) for the model."""
    angle_ok, angles = _angle_condition(model)
    bound = model.sectional_lower_bound()
    reasons = []
    diagnostics = {"angles": angles, "dim": model.dim}
    if not angle_ok:
        reasons.append("a codimension-two cone angle exceeds 2*pi")
        return CurvatureVerdict("cbb", False, k, model.dim, True, angle_ok,
                                bound, reasons, diagnostics)
    if bound is None:
        reasons.append("regular-set sectional bound unknown for this metric")
        return CurvatureVerdict("cbb", None, k, model.dim, True, angle_ok,
                                None, reasons, diagnostics)
    if bound >= k - 1e-12:
        return CurvatureVerdict("cbb", True, k, model.dim, True, angle_ok,
                                bound, reasons, diagnostics)
    reasons.append(f"regular sectional bound {bound} is below k={k}")
    return CurvatureVerdict("cbb", False, k, model.dim, True, angle_ok,
                            bound, reasons, diagnostics)


# ---------------------------------------------------------------------------
# Catalog


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    model: StratifiedModel
    K: float
    N: float
    expect_rcd: Optional[bool]
    k_sec: float
    expect_cbb: Optional[bool]
    notes: str = ""
    check_config: Optional[dict] = None


def catalog() -> list:
    """The standing model catalog with expected verdicts."""
    entries = [
        CatalogEntry(
            "round_sphere_2", RoundSphereSpace(2), 1.0, 2, True, 1.0, True,
            "unit 2-sphere"),
        CatalogEntry(
            "round_sphere_3", RoundSphereSpace(3), 2.0, 3, True, 1.0, True,
            "unit 3-sphere"),
        CatalogEntry(
            "spindle_quarter", SuspensionSpace(Circle(0.25)), 1.0, 2,
            True, 1.0, True, "two cone points of angle pi/2"),
        CatalogEntry(
            "spindle_half", SuspensionSpace(Circle(0.5)), 1.0, 2,
            True, 1.0, True, "two cone points of angle pi"),
        CatalogEntry(
            "spindle_unit", SuspensionSpace(Circle(1.0)), 1.0, 2,
            True, 1.0, True, "suspension closing up to the round sphere"),
        CatalogEntry(
            "spindle_wide", SuspensionSpace(Circle(1.25)), 1.0, 2,
            False, 1.0, False, "cone angle 2.5*pi at both poles",
            check_config={"samples": 100_000, "bg_radii": [0.2, 2.5],
                          "bg_centers": [[0.35, 0.0]]}),
        CatalogEntry(
            "suspension_sphere", SuspensionSpace(RoundSphere(2)), 2.0, 3,
            True, 1.0, True, "suspension of the round 2-sphere; smooth"),
        CatalogEntry(
            "suspension_spindle", SuspensionSpace(Suspension(Circle(0.75))),
            2.0, 3, True, 1.0, True,
            "3-sphere with a conical circle of angle 1.5*pi"),
        CatalogEntry(
            "orbifold_cone_half", EuclideanCone(Circle(0.5), 2.0), 0.0, 2,
            True, 0.0, True, "quotient-type flat cone, angle pi"),
        CatalogEntry(
            "orbifold_cone_third", EuclideanCone(Circle(1.0 / 3.0), 2.0),
            0.0, 2, True, 0.0, True, "quotient-type flat cone, angle 2*pi/3"),
        CatalogEntry(
            "flat_cone_075", EuclideanCone(Circle(0.75), 2.0), 0.0, 2,
            True, 0.0, True, "flat cone of angle 1.5*pi"),
        CatalogEntry(
            "cone_wide", EuclideanCone(Circle(1.5), 5.0), 0.0, 2,
            False, 0.0, False, "cone angle 3*pi; all lower bounds fail",
            check_config={"samples": 100_000, "bg_radii": [0.25, 4.0],
                          "bg_centers": [[0.5, 0.0]]}),
        CatalogEntry(
            "cone_over_sphere", EuclideanCone(RoundSphere(2), 1.5), 0.0, 3,
            True, 0.0, True, "flat 3-cone, apex of full codimension"),
        CatalogEntry(
            "cone_over_spindle", EuclideanCone(Suspension(Circle(0.5)), 1.5),
            0.0, 3, True, 0.0, True,
            "flat 3-cone with two singular rays of angle pi"),
        CatalogEntry(
            "fermi_round", FermiSphere(math.pi / 2, TWO_PI), 2.0, 3,
            True, 1.0, True, "tube chart of the round 3-sphere; smooth"),
        CatalogEntry(
            "fermi_narrow", FermiSphere(math.pi / 2, 1.5 * math.pi), 2.0, 3,
            None, 1.0, None,
            "blended conical circle, angle 1.5*pi; regular bound numeric"),
        CatalogEntry(
            "fermi_wide", FermiSphere(math.pi / 2, 3.0 * math.pi), 2.0, 3,
            False, 1.0, False, "blended conical circle, angle 3*pi",
            check_config={"samples": 100_000,
                          "bg_radii": [0.4, 1.5, 2.6],
                          "bg_centers": [[-1.0, 0.0, 0.0, 0.0]]}),
    ]
    return entries


def catalog_verdicts() -> list:
    """(entry, rcd verdict, cbb verdict) across the catalog."""
    out = []
    for entry in catalog():
        v_rcd = classify(entry.model, entry.K, entry.N)
        v_cbb = alexandrov_classify(entry.model, entry.k_sec)
        out.append((entry, v_rcd, v_cbb))
    return out


def consistency_check(entry: CatalogEntry, config: dict) -> list:
    """Cross-consistency between the verdict and the numeric suite:
    a true verdict requires every configured check to pass; a false verdict
    for angle reasons requires a volume-comparison or quadruple failure."""
    from .checks import run_checks
    verdict = classify(entry.model, entry.K, entry.N)
    local = dict(config)
    if entry.check_config:
        local.update(entry.check_config)
    # volume comparisons test the verdict's own (K, N) claim
    local.setdefault("bg_K", entry.K)
    local.setdefault("bg_N", entry.N)
    reports = run_checks(entry.model, local)
    if verdict.holds is True:
        ok = all(r.passed for r in reports)
        summary = "all configured checks pass"
    elif verdict.holds is False and not verdict.angle_ok:
        targets = [r for r in reports
                   if r.name in ("bishop_gromov", "quadruple_comparison")]
        if not targets:
            targets = reports
        ok = any(not r.passed for r in targets)
        summary = "a volume or angle comparison fails as required"
    else:
        ok = True
        summary = "indeterminate or non-angle failure; no constraint"
    meta = CheckReport.from_margin(
        name="verdict_consistency",
        margin=0.0 if ok else -1.0,
        tolerance=0.0,
        seed=config.get("seed"),
        diagnostics={"entry": entry.name, "verdict": verdict.to_dict(),
                     "summary": summary,
                     "checks": [r.name for r in reports],
                     "passed": [r.passed for r in reports]},
    )
    return [meta] + reports
