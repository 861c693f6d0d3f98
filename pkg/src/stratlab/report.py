"""Shared result containers and error types used across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


class ResolutionError(RuntimeError):
    """Discrete approximation too coarse (e.g. disconnected graph)."""


class FidelityRangeError(ValueError):
    """A spectral query above the trusted eigenvalue range."""


class MetricConsistencyError(ValueError):
    """Distance data violating the triangle inequality beyond tolerance."""


class NumericalError(RuntimeError):
    """An estimator or solver failed to produce a usable result."""


@dataclass
class CheckReport:
    """Outcome of a single numerical check.

    ``margin`` is signed: positive means the inequality held with room to
    spare, negative means a violation of that size.  ``passed`` is always
    ``margin >= -tolerance``.
    """

    name: str
    passed: bool
    margin: float
    tolerance: float
    n_samples: int = 0
    seed: Optional[int] = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_margin(cls, name, margin, tolerance, n_samples=0, seed=None,
                    diagnostics=None):
        return cls(
            name=name,
            passed=bool(margin >= -tolerance),
            margin=float(margin),
            tolerance=float(tolerance),
            n_samples=int(n_samples),
            seed=seed,
            diagnostics=diagnostics or {},
        )

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(value):
    """Recursively coerce numpy scalars/arrays into plain Python types."""
    import numpy as np

    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    return value
