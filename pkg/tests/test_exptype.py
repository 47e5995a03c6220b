import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import factorial

from borelcalc import contours
from borelcalc.errors import DegenerateFunction, InvalidContour, OutsideDomain
from borelcalc.exptype import (BorelFn, ContourMeasure, EntireFn, borel_exact, borel_series,
                               estimate_order, estimate_type, p_transform, polya_reconstruct,
                               total_variation)


def test_evaluation_and_derivative():
    f = EntireFn.from_terms([((1, 2), 1.5), ((0, 0, 1), -1j)])
    z = np.array([0.3, -1 + 0.5j])
    expect = (1 + 2 * z) * np.exp(1.5 * z) + z**2 * np.exp(-1j * z)
    assert np.allclose(f(z), expect, rtol=1e-14)
    d = (2 + 1.5 * (1 + 2 * z)) * np.exp(1.5 * z) + (2 * z - 1j * z**2) * np.exp(-1j * z)
    assert np.allclose(f.derivative()(z), d, rtol=1e-14)


def test_from_terms_merges_exponents():
    f = EntireFn.from_terms([((1,), 2.0), ((3,), 2.0)])
    assert len(f.terms) == 1 and f.terms[0][0] == (4 + 0j,)


def test_duplicate_exponents_rejected():
    with pytest.raises(ValueError):
        EntireFn((((1,), 1.0), ((2,), 1.0)))


def test_declared_type_checked():
    with pytest.raises(ValueError):
        EntireFn((((1,), 3.0),), declared_type=2.0)


def test_taylor_coefficients():
    f = EntireFn.from_terms([((0, 1), 2.0)])  # z e^{2z}
    a = f.taylor_coeffs(6)
    k = np.arange(6)
    expect = np.where(k > 0, 2.0 ** np.maximum(k - 1, 0) / factorial(np.maximum(k - 1, 0)), 0)
    assert np.allclose(a, expect, atol=1e-15)


def test_json_round_trip():
    f = EntireFn.from_terms([((1, 2j), 1.5), ((0.5,), -2)], label="demo")
    g = EntireFn.from_json(f.to_json())
    z = np.linspace(-1, 1, 5) + 0.2j
    assert np.allclose(f(z), g(z), rtol=0, atol=0)


def test_estimate_type_and_order():
    k = np.arange(41)
    e2 = 2.0**k / factorial(k)
    assert abs(estimate_type(e2) - 2.0) < 0.2
    assert abs(estimate_order(e2) - 1.0) < 0.1
    cosh_sqrt2 = np.where(k % 2 == 0, 2.0 ** (k / 2) / factorial(k), 0)
    assert abs(estimate_type(cosh_sqrt2) - math.sqrt(2)) < 0.1
    poly = np.zeros(20)
    poly[:3] = [1, 2, 3]
    assert estimate_type(poly) == 0.0
    with pytest.raises(DegenerateFunction):
        estimate_type(np.zeros(20))


def test_borel_exact_pole_structure():
    f = EntireFn.from_terms([((0, 0, 1), 1.0)])  # z^2 e^z -> 2/(z-1)^3
    b = borel_exact(f)
    z = 3 + 1j
    assert abs(b(z) - 2 / (z - 1) ** 3) < 1e-15
    assert b.singularities[0].order == 3
    b.check_invariants()


def test_borel_series_agrees_with_exact():
    f = EntireFn.from_terms([((1, -1), 0.5), ((2,), -0.3j)])
    a = f.taylor_coeffs(80)
    b = borel_exact(f)
    for z in (2.0, 1.5j, -1 - 1j):
        v, err = borel_series(a, z, full_output=True)
        assert abs(v - b(z)) < 1e-12
    with pytest.raises(OutsideDomain):
        borel_series(a, 0.2)


def test_polya_inverts_borel():
    f = EntireFn.from_terms([((1, 0, 2), 1 + 1j), ((0.5,), -2.0)])
    z = np.array([0, 1, -1.5j, 2 * np.exp(0.7j)])
    rec = polya_reconstruct(borel_exact(f), None, z)
    assert np.max(np.abs(rec - f(z)) / np.abs(f(z))) < 1e-12


def test_polya_rejects_non_enclosing_contour():
    b = borel_exact(EntireFn.exp(2.0))
    with pytest.raises(InvalidContour):
        polya_reconstruct(b, contours.circle(0, 1), 0.5)
    with pytest.raises(InvalidContour):
        polya_reconstruct(b, contours.circle(0, 3).reversed(), 0.5)


def test_negative_control_wrong_transform_fails():
    # the reconstruction must actually depend on B: a perturbed B gives a different function
    f = EntireFn.exp(1.0)
    good = borel_exact(f)
    bad = BorelFn(lambda z: good(z) + 1 / (z - 0.5) ** 2, good.singularities + (), 1.0)
    gamma = contours.circle(0, 2)
    assert abs(polya_reconstruct(bad, gamma, 1.0) - f(1.0)) > 0.1


def test_p_transform_and_total_variation():
    gamma = contours.circle(0, 1)
    mu = ContourMeasure(gamma, lambda s: 1 / s)
    assert abs(p_transform(mu, 0.7) - 1) < 1e-13
    assert abs(total_variation(mu) - 1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.complex_numbers(max_magnitude=3), st.floats(-2, 2), st.floats(-2, 2)),
                min_size=1, max_size=3, unique_by=lambda t: (round(t[0].real, 3), round(t[0].imag, 3))))
def test_round_trip_property(draws):
    terms = [((complex(a, b),), lam) for lam, a, b in draws if abs(complex(a, b)) > 1e-3]
    if not terms:
        return
    lams = [t[1] for t in terms]
    if min((abs(x - y) for i, x in enumerate(lams) for y in lams[i + 1:]), default=1) < 1e-3:
        return
    f = EntireFn.from_terms(terms)
    z = np.array([0.5, -1j, 1 + 1j])
    scale = sum(abs(t[0][0]) * np.exp(abs(t[1]) * 2) for t in terms)
    assert np.max(np.abs(polya_reconstruct(borel_exact(f), None, z) - f(z))) <= 1e-11 * scale
