import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from borelcalc import contours
from borelcalc.errors import InvalidGeometry, NoConvergence, SingularityOnPath


def test_circle_integral_of_reciprocal():
    res = contours.integrate(lambda s: 1 / (s - 0.3j), contours.circle(0, 1))
    assert abs(res.value - contours.TWO_PI_I) < 1e-13


def test_cauchy_formula_for_exp():
    z0 = 0.2 - 0.1j
    val = contours.integrate(lambda s: np.exp(s) / (s - z0), contours.circle(0, 2)).value
    assert abs(val / contours.TWO_PI_I - np.exp(z0)) < 1e-13


def test_closed_integral_of_entire_function_vanishes():
    val = contours.integrate(lambda s: np.exp(3 * s) * s**4, contours.rectangle(-1 - 1j, 2 + 1j)).value
    assert abs(val) < 1e-11


def test_vector_density():
    k = np.arange(5)[:, None]
    val = contours.integrate(lambda s: s[None, :] ** (k - 1), contours.circle(0, 1)).value
    expect = np.zeros(5, complex)
    expect[0] = contours.TWO_PI_I
    assert np.allclose(val, expect, atol=1e-13)


def test_orientation_and_reverse():
    c = contours.circle(0, 1)
    assert c.orientation > 0
    assert c.reversed().orientation < 0
    assert abs(c.length - 2 * math.pi) < 1e-12


def test_json_round_trip():
    c = contours.angular_contour(0, 0.875 * math.pi, 0.1, 10)
    back = contours.Contour.from_json(c.to_json())
    assert np.allclose(back.sample(8), c.sample(8))


def test_joined_segments_must_meet():
    a = contours.polygon([0, 1], closed=False)
    b = contours.polygon([2, 3], closed=False)
    with pytest.raises(InvalidGeometry):
        a + b


def test_singularity_on_path_reported():
    with pytest.raises(SingularityOnPath):
        contours.integrate(lambda s: np.where(s.real > 1, np.nan, 1.0), contours.polygon([0, 2], closed=False))


def test_refinement_budget_exhausted():
    cfg = contours.QuadratureConfig(4, refine_until=1e-15, max_refinements=1)
    with pytest.raises(NoConvergence) as info:
        contours.integrate(lambda s: np.exp(40 * s), contours.circle(0, 1), cfg)
    assert info.value.details.get("best") is not None or hasattr(info.value, "best")


def test_angular_contour_geometry():
    psi = 0.875 * math.pi
    c = contours.angular_contour(0, psi, 0.1, 10)
    assert abs(c.start - 10 * np.exp(-1j * psi)) < 1e-12
    assert abs(c.end - 10 * np.exp(1j * psi)) < 1e-12
    pts = c.sample(16)
    assert np.min(np.abs(pts)) >= 0.1 - 1e-12
    with pytest.raises(InvalidGeometry):
        contours.angular_contour(0, 0.4 * math.pi, 0.1, 10)


def test_stubs_extend_contour():
    psi = 0.8 * math.pi
    f = lambda s: np.exp(s) / s**2
    short = contours.integrate(f, contours.angular_contour(0, psi, 0.1, 10)).value
    long = contours.integrate(f, contours.angular_contour(0, psi, 0.1, 20)).value
    a, b = contours.angular_stubs(0, psi, 10, 20)
    extra = contours.integrate(f, a).value + contours.integrate(f, b).value
    assert abs(short + extra - long) < 1e-12


def test_hankel_contour_gives_reciprocal_gamma():
    # 1/Gamma(2) = (1/2 pi i) int e^s s^-2 ds over a contour wrapping the negative axis
    psi = 0.9 * math.pi
    val = contours.integrate(lambda s: np.exp(s) / s**2, contours.angular_contour(0, psi, 0.5, 60)).value
    assert abs(val / contours.TWO_PI_I - 1.0) < 1e-12


def test_count_zeros_polynomial():
    f = lambda s: (s - 0.2) ** 2 * (s + 0.5j) * (s - 3)
    assert contours.count_zeros(f, contours.rectangle(-1 - 1j, 1 + 1j)) == 3


def test_winding_number():
    c = contours.circle(1, 0.5)
    assert contours.winding_number(c, 1.2) == 1
    assert contours.winding_number(c, 0) == 0
    assert contours.winding_number(c.reversed(), 1.2) == -1


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3))
def test_cauchy_property(x, y, r):
    c = complex(x, y)
    z0 = c + 0.3 * r * np.exp(0.7j)
    val = contours.integrate(lambda s: np.exp(s) / (s - z0), contours.circle(c, r)).value
    assert abs(val / contours.TWO_PI_I - np.exp(z0)) <= 1e-11 * max(1, abs(np.exp(z0)))
