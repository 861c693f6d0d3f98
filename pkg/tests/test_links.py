import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratlab.links import (Circle, RoundSphere, Suspension, link_diameter,
                            link_distance, link_from_dict, sample_sin_power,
                            sin_power_integral, sphere_area)


def test_sphere_area_values():
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(3) == pytest.approx(2 * math.pi ** 2)


def test_sin_power_integral_against_quadrature():
    from scipy.integrate import quad
    for m in range(0, 6):
        val, _ = quad(lambda t: math.sin(t) ** m, 0, math.pi)
        assert sin_power_integral(m) == pytest.approx(val, rel=1e-12)


def test_circle_distance_wraps_at_circumference():
    c = Circle(0.7)
    L = 2 * math.pi * 0.7
    p = np.array([[0.3]])
    q = np.array([[2.9]])
    gap = abs(2.9 - 0.3)
    expect = min(gap, L - gap)
    assert link_distance(c, p, q) == pytest.approx(expect)
    assert c.diameter() == pytest.approx(math.pi * 0.7)


def test_circle_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        Circle(0.0)
    with pytest.raises(ValueError):
        Circle(-1.0)


def test_round_sphere_distance_is_arc_length():
    s = RoundSphere(2)
    p = np.array([[1.0, 0.0, 0.0]])
    q = np.array([[0.0, 1.0, 0.0]])
    assert link_distance(s, p, q) == pytest.approx(math.pi / 2)
    assert link_diameter(s) == pytest.approx(math.pi)


def test_suspension_link_distance_law():
    # suspension over a circle: cos d = cos t cos s + sin t sin s cos(dl)
    lk = Suspension(Circle(0.5))
    p = np.array([[0.8, 0.2]])
    q = np.array([[1.9, 1.4]])
    gap = 1.2
    dl = min(gap, 2 * math.pi * 0.5 - gap) / 0.5 * 0.5
    c = (math.cos(0.8) * math.cos(1.9)
         + math.sin(0.8) * math.sin(1.9) * math.cos(min(dl, math.pi)))
    assert link_distance(lk, p, q) == pytest.approx(math.acos(c))


def test_suspension_diameter_is_pi():
    assert link_diameter(Suspension(Circle(0.25))) == pytest.approx(math.pi)


def test_link_volumes():
    assert Circle(0.75).volume() == pytest.approx(1.5 * math.pi)
    assert RoundSphere(2).volume() == pytest.approx(4 * math.pi)
    # suspension over circle of radius a has area 4*pi*a
    assert Suspension(Circle(0.5)).volume() == pytest.approx(2 * math.pi)


def test_link_roundtrip_serialization():
    for lk in (Circle(0.3), RoundSphere(2), Suspension(Circle(0.8))):
        d = lk.to_dict()
        back = link_from_dict(d)
        assert type(back) is type(lk)
        assert back.volume() == pytest.approx(lk.volume())


def test_link_from_dict_rejects_unknown_kind():
    with pytest.raises(ValueError):
        link_from_dict({"kind": "torus"})


def test_sample_sin_power_moments():
    rng = np.random.default_rng(np.random.PCG64(11))
    t = sample_sin_power(3, 200_000, rng)
    # density sin^3(t)/integral; E[cos^2] = 1/5 for m=3 on [0, pi]
    assert np.mean(np.cos(t) ** 2) == pytest.approx(0.2, abs=0.005)
    assert t.min() >= 0.0 and t.max() <= math.pi


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.5), st.floats(0, 6.28), st.floats(0, 6.28),
       st.floats(0, 6.28))
def test_circle_triangle_inequality(a, x, y, z):
    c = Circle(a)
    L = c.length
    P = np.array([[x % L]])
    Q = np.array([[y % L]])
    R = np.array([[z % L]])
    dxy = link_distance(c, P, Q)
    dyz = link_distance(c, Q, R)
    dxz = link_distance(c, P, R)
    assert dxz <= dxy + dyz + 1e-12
