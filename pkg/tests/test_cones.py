import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (clairaut_geodesic_spindle, flat_cone_distance,
                     grid_geodesic_suspension, sphere_distance,
                     suspension_distance)
from stratlab.cones import (ConePoint, PolygonalCurve, comparison_angle,
                            cone_distance, cone_paired_distance,
                            geodesic_hits_apex, perturb_curve_off_singular,
                            quadruple_comparison, suspension_paired_distance,
                            unfold_flat_cone)
from stratlab.links import Circle, RoundSphere, Suspension
from stratlab.report import MetricConsistencyError
from stratlab.spaces import EuclideanCone, SuspensionSpace


# ---------------------------------------------------------------- distances

def test_cone_distance_matches_unfolding_law():
    a = 0.75
    link = Circle(a)
    # arc-length link coordinates
    cases = [(1.0, 0.0, 1.0, 1.1), (0.5, 0.2, 2.0, 2.2), (1.4, 4.2, 0.3, 0.9)]
    for r1, s1, r2, s2 in cases:
        got = cone_distance(ConePoint(r1, [s1]), ConePoint(r2, [s2]), link)
        gap = abs(s1 - s2) % link.length
        gap = min(gap, link.length - gap)
        want = math.sqrt(r1 ** 2 + r2 ** 2
                         - 2 * r1 * r2 * math.cos(min(gap, math.pi)))
        assert got == pytest.approx(want, rel=1e-12)


def test_cone_distance_through_tip_when_link_separation_large():
    # opening 3*pi: points opposite in the link are separated by 1.5*pi > pi
    link = Circle(1.5)
    p = ConePoint(1.0, [0.0])
    q = ConePoint(2.0, [link.length / 2])
    assert cone_distance(p, q, link) == pytest.approx(3.0)
    assert geodesic_hits_apex(link, p.y, q.y)


def test_narrow_cone_never_reaches_tip_separation():
    # for opening below 2*pi the intrinsic link diameter is below pi
    link = Circle(0.75)
    p = ConePoint(1.0, [0.0])
    q = ConePoint(1.0, [link.length / 2])
    assert not geodesic_hits_apex(link, p.y, q.y)
    want = math.sqrt(2 - 2 * math.cos(0.75 * math.pi))
    assert cone_distance(p, q, link) == pytest.approx(want)


def test_cone_distance_to_tip_is_radius():
    link = Circle(0.6)
    p = ConePoint(1.7, [2.0])
    tip = ConePoint(0.0, [0.0])
    assert cone_distance(p, tip, link) == pytest.approx(1.7)


def test_cone_paired_distance_agrees_with_scalar():
    link = Circle(1.25)
    rng = np.random.default_rng(np.random.PCG64(5))
    P = np.column_stack([rng.uniform(0, 2, 40),
                         rng.uniform(0, link.length, 40)])
    Q = np.column_stack([rng.uniform(0, 2, 40),
                         rng.uniform(0, link.length, 40)])
    batch = cone_paired_distance(link, P, Q)
    for i in range(40):
        assert batch[i] == pytest.approx(
            cone_distance(P[i], Q[i], link), rel=1e-12)


def test_flat_cone_distance_against_oracle():
    for a in (0.25, 0.75, 1.0):
        link = Circle(a)
        rng = np.random.default_rng(np.random.PCG64(7))
        for _ in range(25):
            r1, r2 = rng.uniform(0.1, 2, 2)
            s1, s2 = rng.uniform(0, link.length, 2)
            got = cone_distance(ConePoint(r1, [s1]), ConePoint(r2, [s2]), link)
            want = flat_cone_distance(1.0, r1, s1 / a, r2, s2 / a) if a == 1.0 \
                else flat_cone_distance(a, r1, s1 / a, r2, s2 / a)
            assert got == pytest.approx(want, rel=1e-10)


def test_suspension_distance_round_case_is_spherical():
    # suspension of the unit circle is the round 2-sphere
    link = Circle(1.0)
    P = np.array([0.7, 0.4])
    Q = np.array([2.1, 3.9])
    got = suspension_paired_distance(link, P, Q)
    p3 = np.array([math.sin(0.7) * math.cos(0.4), math.sin(0.7) * math.sin(0.4),
                   math.cos(0.7)])
    q3 = np.array([math.sin(2.1) * math.cos(3.9), math.sin(2.1) * math.sin(3.9),
                   math.cos(2.1)])
    assert float(got) == pytest.approx(sphere_distance(p3, q3), abs=1e-12)


def test_spindle_distance_against_clairaut_quadrature():
    a = 0.7
    m = SuspensionSpace(Circle(a))
    cases = [(0.9, 0.3, 2.2, 2.9), (0.5, 0.0, 1.1, 1.0), (1.3, 2.0, 1.7, 3.1)]
    for t1, s1, t2, s2 in cases:
        d_pkg = float(m.paired_distance(np.array([t1, s1]), np.array([t2, s2])))
        L = 2 * math.pi * a
        gap = abs(s1 - s2) % L
        gap = min(gap, L - gap)
        d_ref = clairaut_geodesic_spindle(a, t1, t2, gap / a)
        assert d_ref is not None
        assert d_pkg == pytest.approx(d_ref, abs=1e-8)


def test_spindle_distance_below_grid_dijkstra():
    # the lattice path is admissible, so it upper-bounds the true distance
    a = 0.7
    m = SuspensionSpace(Circle(a))
    d_pkg = float(m.paired_distance(np.array([0.9, 0.3]), np.array([2.2, 2.9])))
    d_grid = grid_geodesic_suspension(a, 0.9, 0.3 / a, 2.2, 2.9 / a)
    assert d_pkg <= d_grid <= 1.10 * d_pkg


def test_suspension_poles_are_pi_apart():
    link = Circle(0.5)
    north = np.array([0.0, 0.0])
    south = np.array([math.pi, 1.5])
    assert float(suspension_paired_distance(link, north, south)) == \
        pytest.approx(math.pi)


# --------------------------------------------------------------- unfolding

def test_unfold_length_matches_cone_distance():
    angle = 1.5 * math.pi
    p = ConePoint(1.0, [0.3])
    q = ConePoint(1.6, [1.1])
    geo = unfold_flat_cone(angle, p, q)
    assert geo.length == pytest.approx(
        cone_distance(p, q, Circle(angle / (2 * math.pi))), rel=1e-12)


def test_unfold_endpoints_and_midpoint_consistency():
    angle = 1.5 * math.pi
    link = Circle(angle / (2 * math.pi))
    p = ConePoint(1.0, [0.3])
    q = ConePoint(1.6, [1.1])
    geo = unfold_flat_cone(angle, p, q)
    pts = geo.point_at(np.array([0.0, 0.5, 1.0]))
    assert pts[0] == pytest.approx([1.0, 0.3])
    assert pts[2] == pytest.approx([1.6, 1.1])
    d1 = cone_distance(pts[0], pts[1], link)
    d2 = cone_distance(pts[1], pts[2], link)
    assert d1 + d2 == pytest.approx(geo.length, rel=1e-9)


def test_unfold_refuses_through_tip_pairs():
    angle = 3.0 * math.pi
    p = ConePoint(1.0, [0.0])
    q = ConePoint(1.0, [1.5 * math.pi])  # arc-length gap 1.5*pi >= pi
    with pytest.raises(ValueError):
        unfold_flat_cone(angle, p, q)


def test_unfold_apex_distance_positive_off_tip():
    geo = unfold_flat_cone(math.pi, ConePoint(1.0, [0.0]), ConePoint(1.0, [0.7]))
    assert geo.min_apex_distance() > 0.3


def test_polyline_stays_on_cone_chart():
    geo = unfold_flat_cone(1.5 * math.pi, ConePoint(0.8, [0.1]),
                           ConePoint(1.2, [1.0]))
    rows = geo.polyline(33)
    assert rows.shape == (33, 3)
    assert np.all(rows[:, 1] > 0)
    assert np.all((rows[:, 2] >= 0) & (rows[:, 2] < 1.5 * math.pi))


# ------------------------------------------------------------ perturbation

def test_perturbation_avoids_tip_and_controls_length():
    model = EuclideanCone(Circle(0.75), 2.0)
    through_tip = PolygonalCurve(model, np.array([[1.0, 0.0],
                                                  [0.0, 0.0],
                                                  [1.0, 1.2]]))
    base_len = through_tip.length()
    for eps in (0.2, 0.1, 0.05):
        pert = perturb_curve_off_singular(through_tip, eps)
        assert np.all(pert.points[:, 0] > 0)
        # rounding the corner may shorten a non-minimizing path, but never
        # by more than the detour budget
        assert abs(pert.length() - base_len) <= eps
    # detour radius halves with eps
    p1 = perturb_curve_off_singular(through_tip, 0.2)
    p2 = perturb_curve_off_singular(through_tip, 0.1)
    assert p2.points[:, 0].min() == pytest.approx(
        0.5 * p1.points[:, 0].min(), rel=1e-9)


def test_perturbation_of_true_tip_geodesic_only_lengthens():
    # opening 3*pi: the through-tip path IS minimizing, so any detour pays
    model = EuclideanCone(Circle(1.5), 3.0)
    L = model.link.length
    curve = PolygonalCurve(model, np.array([[1.0, 0.0],
                                            [0.0, 0.0],
                                            [1.0, L / 2]]))
    base = curve.length()
    assert base == pytest.approx(2.0)
    for eps in (0.2, 0.05):
        pert = perturb_curve_off_singular(curve, eps)
        assert np.all(pert.points[:, 0] > 0)
        assert 0 <= pert.length() - base <= eps


def test_perturbation_requires_interior_singular_vertex():
    model = EuclideanCone(Circle(0.75), 2.0)
    curve = PolygonalCurve(model, np.array([[0.0, 0.0], [1.0, 0.5]]))
    with pytest.raises(ValueError):
        perturb_curve_off_singular(curve, 0.1)


def test_perturbation_no_singular_vertex_is_identity():
    model = EuclideanCone(Circle(0.75), 2.0)
    curve = PolygonalCurve(model, np.array([[1.0, 0.0], [1.5, 0.4]]))
    assert perturb_curve_off_singular(curve, 0.1) is curve


def test_perturbation_at_suspension_pole():
    model = SuspensionSpace(Circle(0.5))
    curve = PolygonalCurve(model, np.array([[1.0, 0.0],
                                            [0.0, 0.0],
                                            [1.0, 0.8]]))
    pert = perturb_curve_off_singular(curve, 0.1)
    assert np.all(pert.points[:, 0] > 0)
    assert pert.length() - curve.length() <= 0.1


# -------------------------------------------------------------- comparison

def test_comparison_angle_flat_right_triangle():
    ang = comparison_angle(0.0, 3.0, 4.0, 5.0)
    assert ang == pytest.approx(math.pi / 2)


def test_comparison_angle_spherical_equilateral():
    # equilateral with side pi/2 on the unit sphere has right angles
    ang = comparison_angle(1.0, math.pi / 2, math.pi / 2, math.pi / 2)
    assert ang == pytest.approx(math.pi / 2)


def test_comparison_angle_rejects_triangle_violation():
    with pytest.raises(MetricConsistencyError):
        comparison_angle(0.0, 1.0, 1.0, 5.0)


def test_quadruple_passes_on_round_sphere():
    from stratlab.spaces import RoundSphereSpace
    m = RoundSphereSpace(2)
    e = np.eye(3)
    rep = quadruple_comparison(m, e[0], e[1], e[2],
                               np.array([-1.0, 0.0, 0.0]), k=1.0)
    assert rep.passed
    assert rep.name == "quadruple_comparison"


def test_quadruple_fails_at_wide_cone_apex():
    model = EuclideanCone(Circle(1.5), 5.0)
    tip = np.array([0.0, 0.0])
    L = model.link.length
    a = np.array([1.0, 0.0])
    b = np.array([1.0, L / 3])
    c = np.array([1.0, 2 * L / 3])
    rep = quadruple_comparison(model, tip, a, b, c, k=0.0)
    assert not rep.passed
    # angle sum is 3*pi at the tip of a 3*pi cone
    assert rep.diagnostics["angle_sum"] == pytest.approx(3 * math.pi, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0.0, 10.0),
       st.floats(0.0, 10.0), st.floats(0.3, 1.5))
def test_cone_distance_metric_axioms(r1, r2, s1, s2, a):
    link = Circle(a)
    s1, s2 = s1 % link.length, s2 % link.length
    p, q = ConePoint(r1, [s1]), ConePoint(r2, [s2])
    d = cone_distance(p, q, link)
    assert d == pytest.approx(cone_distance(q, p, link), rel=1e-12)
    assert d <= r1 + r2 + 1e-12  # through-tip path is always admissible
    assert d >= abs(r1 - r2) - 1e-12
    assert cone_distance(p, p, link) == pytest.approx(0.0, abs=1e-9)
