import math

import numpy as np
import pytest

from oracles import sphere_spectrum, spindle_spectrum, truncated_kernel_mass_quad
from stratlab.links import Circle
from stratlab.montecarlo import sample_points
from stratlab.report import (FidelityRangeError, NumericalError,
                             ResolutionError)
from stratlab.spaces import RoundSphereSpace, SuspensionSpace
from stratlab.spectral import (SpectralData, build_graph, default_bandwidth,
                               kernel_mass, lichnerowicz_check,
                               sphere_eigenvalues, spindle_eigenvalues,
                               spectrum, weyl_ratio)


# ------------------------------------------------------------ kernel masses

def test_kernel_mass_matches_quadrature():
    for dim in (1, 2, 3):
        for eps in (0.1, 0.37):
            for moment in (0, 2):
                exact = kernel_mass(dim, eps, moment=moment)
                quad = truncated_kernel_mass_quad(dim, eps, 4.0, moment)
                assert exact == pytest.approx(quad, rel=1e-12)


def test_kernel_mass_rejects_other_moments():
    with pytest.raises(ValueError):
        kernel_mass(2, 0.1, moment=1)


# ----------------------------------------------------------- graph assembly

def test_build_graph_requires_positive_bandwidth(s2_cloud):
    with pytest.raises(ValueError):
        build_graph(s2_cloud, 0.0)


def test_build_graph_disconnected_raises(circle_model):
    cloud = sample_points(circle_model, 40, 1, use_cache=False)
    with pytest.raises(ResolutionError):
        build_graph(cloud, 0.002)


def test_default_bandwidth_unknown_dimension():
    with pytest.raises(ValueError):
        default_bandwidth(RoundSphereSpace(4), 1000)


def test_default_bandwidth_scales_with_sample_size(s2_model):
    e1 = default_bandwidth(s2_model, 1000)
    e2 = default_bandwidth(s2_model, 4000)
    assert e2 == pytest.approx(e1 / 2.0)


def test_graph_is_deterministic(s2_model):
    cloud = sample_points(s2_model, 800, 5, use_cache=False)
    g1 = build_graph(cloud, 0.35)
    g2 = build_graph(cloud, 0.35)
    assert np.array_equal(g1.kernel.toarray(), g2.kernel.toarray())
    d1 = spectrum(g1, k=4)
    d2 = spectrum(g2, k=4)
    assert np.array_equal(d1.eigenvalues, d2.eigenvalues)
    assert np.array_equal(d1.eigenfunctions, d2.eigenfunctions)


# ------------------------------------------------- operator exact identities

def test_laplacian_annihilates_constants(s2_graph):
    lap1 = s2_graph.apply_laplacian(np.ones(s2_graph.n))
    assert np.max(np.abs(lap1)) < 1e-10 / s2_graph.eps ** 2


def test_integration_by_parts_is_exact(s2_graph):
    rng = np.random.default_rng(0)
    f = rng.standard_normal(s2_graph.n)
    g = rng.standard_normal(s2_graph.n)
    a = s2_graph.inner(f, s2_graph.apply_laplacian(g))
    b = s2_graph.inner(g, s2_graph.apply_laplacian(f))
    c = float(np.sum(s2_graph.measure * s2_graph.gamma(f, g)))
    scale = max(abs(a), 1.0)
    assert abs(a - b) < 1e-9 * scale
    assert abs(a - c) < 1e-9 * scale


def test_gamma_of_height_function_on_sphere(s2_graph):
    # |grad z|^2 = 1 - z^2 on the unit sphere; the kernel form carries an
    # O(eps^2) smoothing bias plus sampling noise
    z = s2_graph.cloud.points[:, 2]
    total = float(np.sum(s2_graph.measure * s2_graph.gamma(z)))
    exact = 8.0 * math.pi / 3.0
    assert total == pytest.approx(exact, rel=0.05)
    assert np.all(s2_graph.gradient_norm(z) >= 0)


def test_dirichlet_energy_is_nonnegative(s2_graph):
    rng = np.random.default_rng(3)
    for _ in range(5):
        f = rng.standard_normal(s2_graph.n)
        assert s2_graph.dirichlet(f) >= 0


def test_shortest_paths_bound_metric(circle_graph):
    d_graph = circle_graph.shortest_paths([0])[0]
    pts = circle_graph.cloud.points
    d_true = circle_graph.cloud.model.distances_from(pts[0], pts)
    # slack covers the arccos conditioning loss near antipodal pairs
    assert np.all(d_graph >= d_true - 1e-7)
    assert np.max(d_graph - d_true) < 0.05 * math.pi


# ----------------------------------------------------------------- spectrum

def test_sphere_spectrum_against_analytic(s2_spectrum):
    exact = sphere_spectrum(2, 6)
    assert s2_spectrum.eigenvalues[0] == pytest.approx(0.0, abs=1e-8)
    for lam, ref in zip(s2_spectrum.eigenvalues[1:], exact[1:]):
        assert lam == pytest.approx(ref, rel=0.07)
    assert s2_spectrum.eigenvalue_count(4.0) == 4


def test_spindle_spectrum_against_analytic(spindle_half_spectrum):
    exact = spindle_spectrum(0.5, 6)
    for lam, ref in zip(spindle_half_spectrum.eigenvalues[1:], exact[1:]):
        assert lam == pytest.approx(ref, rel=0.07)


def test_eigenfunctions_measure_orthonormal(s2_spectrum):
    U = s2_spectrum.eigenfunctions
    m = s2_spectrum.graph.measure
    gram = U.T @ (m[:, None] * U)
    assert np.allclose(gram, np.eye(U.shape[1]), atol=1e-10)


def test_dispersion_correction_monotone(s2_spectrum):
    raw = s2_spectrum.raw_eigenvalues
    cor = s2_spectrum.eigenvalues
    assert np.all(cor >= raw - 1e-12)
    assert np.all(np.diff(cor) >= -1e-12)
    # correction is second order: small for the low modes
    assert cor[1] - raw[1] < 0.1 * cor[1]


def test_residual_check_catches_corruption(s2_spectrum):
    good = SpectralData(s2_spectrum.graph, s2_spectrum.eigenvalues,
                        s2_spectrum.eigenfunctions,
                        s2_spectrum.raw_eigenvalues)
    good.check_residuals()
    bad = SpectralData(s2_spectrum.graph, s2_spectrum.eigenvalues,
                       s2_spectrum.eigenfunctions,
                       s2_spectrum.raw_eigenvalues * 1.5)
    with pytest.raises(NumericalError):
        bad.check_residuals()


def test_nonzero_ground_state_rejected(s2_spectrum):
    with pytest.raises(NumericalError):
        SpectralData(s2_spectrum.graph, np.array([0.5, 2.0]),
                     s2_spectrum.eigenfunctions[:, :2])


def test_spectrum_argument_validation(circle_graph):
    with pytest.raises(ValueError):
        spectrum(circle_graph, k=circle_graph.n)


def test_fidelity_range_guard(circle_model):
    # at a coarse bandwidth the high modes leave the resolvable window
    cloud = sample_points(circle_model, 300, 8, use_cache=False)
    g = build_graph(cloud, 0.45)
    with pytest.raises(FidelityRangeError):
        spectrum(g, k=40)


# ------------------------------------------------------- analytic references

def test_sphere_eigenvalue_table():
    assert list(sphere_eigenvalues(2, 9)) == [0, 2, 2, 2, 6, 6, 6, 6, 6]
    assert list(sphere_eigenvalues(1, 5)) == [0, 1, 1, 4, 4]
    assert np.array_equal(sphere_eigenvalues(2, 50), sphere_spectrum(2, 50))


def test_spindle_eigenvalue_table():
    assert list(spindle_eigenvalues(0.5, 9)) == [0, 2, 6, 6, 6, 12, 12, 12, 20]
    assert np.array_equal(spindle_eigenvalues(0.5, 60), spindle_spectrum(0.5, 60))
    # unit factor reproduces the round sphere
    assert np.array_equal(spindle_eigenvalues(1.0, 30), sphere_eigenvalues(2, 30))


def test_weyl_ratio_counts():
    lam = 49 * 50 + 0.5
    ratio = weyl_ratio(sphere_eigenvalues(2, 2600), lam, 2)
    assert ratio == pytest.approx(2500.0 / lam, rel=1e-12)
    with pytest.raises(ValueError):
        weyl_ratio([0.0, 2.0], -1.0, 2)
    with pytest.raises(FidelityRangeError):
        weyl_ratio([0.0, 2.0], 10.0, 2, fidelity_max=5.0)


def test_lichnerowicz_gap(s2_spectrum):
    rep = lichnerowicz_check(s2_spectrum, ricci_bound=1.0, dim=2)
    assert rep.passed
    assert rep.diagnostics["bound"] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        lichnerowicz_check(s2_spectrum, 1.0, dim=1)
