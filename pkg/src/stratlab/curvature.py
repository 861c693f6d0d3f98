"""Finite-difference curvature for metrics given as coordinate callables.

A metric callable maps a coordinate vector ``x`` (shape ``(n,)``) to the
metric matrix ``g(x)`` (shape ``(n, n)``).  These routines are meant for
smooth diagnostics on modified model metrics, not for production tensor
calculus; accuracy is second order in the step.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg


def metric_first_derivatives(metric_fn, x, h=1e-5):
    """dg[k, i, j] = d g_ij / d x_k by central differences."""
    x = np.asarray(x, dtype=float)
    n = x.size
    dg = np.empty((n, n, n))
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = h
        dg[k] = (np.asarray(metric_fn(x + ek)) - np.asarray(metric_fn(x - ek))) / (2 * h)
    return dg


def christoffel_symbols(metric_fn, x, h=1e-5):
    """Gamma[a, i, j] = Gamma^a_ij of the Levi-Civita connection."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(metric_fn(x), dtype=float)
    ginv = np.linalg.inv(g)
    dg = metric_first_derivatives(metric_fn, x, h)
    # lower-index symbol: [c, i, j] = (d_i g_jc + d_j g_ic - d_c g_ij) / 2
    lower = 0.5 * (np.einsum("ijc->cij", dg) + np.einsum("jic->cij", dg)
                   - np.einsum("cij->cij", dg))
    return np.einsum("ac,cij->aij", ginv, lower)


def ricci_tensor(metric_fn, x, h=1e-4):
    """Ricci tensor by finite differences of the Christoffel symbols."""
    x = np.asarray(x, dtype=float)
    n = x.size
    gamma = christoffel_symbols(metric_fn, x, h=h * 0.1)
    dgamma = np.empty((n, n, n, n))
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = h
        gp = christoffel_symbols(metric_fn, x + ek, h=h * 0.1)
        gm = christoffel_symbols(metric_fn, x - ek, h=h * 0.1)
        dgamma[k] = (gp - gm) / (2 * h)
    # R_ij = d_a Gamma^a_ij - d_j Gamma^a_ai
    #        + Gamma^a_ab Gamma^b_ij - Gamma^a_jb Gamma^b_ai
    term1 = np.einsum("aaij->ij", dgamma)
    term2 = np.einsum("jaai->ij", dgamma)
    term3 = np.einsum("aab,bij->ij", gamma, gamma)
    term4 = np.einsum("ajb,bai->ij", gamma, gamma)
    ric = term1 - term2 + term3 - term4
    return 0.5 * (ric + ric.T)


def min_ricci_eigenvalue(metric_fn, x, h=1e-4):
    """Smallest eigenvalue of Ricci relative to the metric at x."""
    x = np.asarray(x, dtype=float)
    ric = ricci_tensor(metric_fn, x, h=h)
    g = np.asarray(metric_fn(x), dtype=float)
    vals = linalg.eigh(ric, g, eigvals_only=True)
    return float(vals[0])


def sectional_range(metric_fn, x, h=1e-4):
    """(min, max) sectional curvature over coordinate planes at x.

    Uses the curvature operator restricted to coordinate 2-planes after
    orthonormalization; adequate for diagonal metrics.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    g = np.asarray(metric_fn(x), dtype=float)
    gamma = christoffel_symbols(metric_fn, x, h=h * 0.1)
    dgamma = np.empty((n, n, n, n))
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = h
        gp = christoffel_symbols(metric_fn, x + ek, h=h * 0.1)
        gm = christoffel_symbols(metric_fn, x - ek, h=h * 0.1)
        dgamma[k] = (gp - gm) / (2 * h)
    # R^a_bij = d_i Gamma^a_jb - d_j Gamma^a_ib
    #           + Gamma^a_ic Gamma^c_jb - Gamma^a_jc Gamma^c_ib
    riem = (np.einsum("iajb->abij", dgamma) - np.einsum("jaib->abij", dgamma)
            + np.einsum("aic,cjb->abij", gamma, gamma)
            - np.einsum("ajc,cib->abij", gamma, gamma))
    riem_low = np.einsum("ac,cbij->abij", g, riem)
    lo, hi = np.inf, -np.inf
    for i in range(n):
        for j in range(i + 1, n):
            num = riem_low[i, j, i, j]
            den = g[i, i] * g[j, j] - g[i, j] ** 2
            k_ij = num / den
            lo = min(lo, k_ij)
            hi = max(hi, k_ij)
    return float(lo), float(hi)
