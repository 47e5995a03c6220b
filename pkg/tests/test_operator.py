import math

import numpy as np
import pytest

from borelcalc import contours, operator, symbols
from borelcalc.errors import DiscViolation, DomainObstruction, InvalidContour, OutsideDomain, PoleError
from borelcalc.exptype import EntireFn


def test_derivative_symbol():
    val = operator.apply(symbols.poly_symbol([0, 1]), EntireFn.exp(2.0), 1.0)
    assert abs(val - 2 * math.e**2) < 1e-12


def test_polynomial_symbol_matches_derivatives():
    phi = EntireFn.from_terms([((1, 0, 3), 0.7), ((2j,), -1.2)])
    f = symbols.poly_symbol([2, 0, -1, 0.5])  # 2 - D^2 + D^3/2
    t = np.linspace(-1, 1, 5)
    expect = 2 * phi(t) - phi.derivative(2)(t) + 0.5 * phi.derivative(3)(t)
    assert np.allclose(operator.apply(f, phi, t), expect, rtol=1e-11, atol=1e-11)


def test_exp_symbol_is_shift():
    phi = EntireFn.from_terms([((1, 1), 0.5), ((1,), -1j)])
    t = np.array([0.0, 0.4, 1.3])
    assert np.allclose(operator.apply(symbols.exp_symbol(), phi, t), phi(t + 1), rtol=1e-12)


def test_eigen_identity_shifted_zeta():
    f = symbols.shifted_zeta_symbol(3.0)
    lam = 0.4 + 0.3j
    t = np.array([0.0, 1.0, -0.5])
    val = operator.apply(f, EntireFn.exp(lam), t)
    assert np.allclose(val, operator.apply_eigen(f, lam) * np.exp(lam * t), rtol=1e-11)


def test_eigen_errors():
    f = symbols.shifted_zeta_symbol(2.0)
    with pytest.raises(PoleError):
        operator.apply_eigen(f, 1j)
    with pytest.raises(OutsideDomain):
        operator.apply_eigen(f, 2 + 1j)


def test_singularity_outside_domain_refused():
    f = symbols.shifted_zeta_symbol(2.0)
    with pytest.raises(DomainObstruction):
        operator.apply(f, EntireFn.exp(3 + 1j), 0.0)


def test_contour_must_enclose():
    with pytest.raises(InvalidContour):
        operator.apply(symbols.poly_symbol([0, 1]), EntireFn.exp(2.0), 0.0, gamma=contours.circle(0, 1))


def test_series_matches_contour():
    h = 5.0
    f = symbols.shifted_zeta_symbol(h)
    a = symbols.taylor_zeta_shifted(h, 32, 1.5)
    phi = EntireFn.exp(0.4)
    t = np.array([0.0, 1.0, 2.0])
    s, info = operator.apply_series(a, phi, t, radius=2.0, full_output=True)
    assert np.max(np.abs(s - operator.apply(f, phi, t))) < 1e-10
    with pytest.raises(DiscViolation):
        operator.apply_series(a, EntireFn.exp(2.5), t, radius=2.0)


def test_runge_closed_forms():
    lam = 1.5 - 0.5j
    z = np.array([0.0, 0.7, 1.5 + 1j])
    around, missing = operator.runge_values(lam, z)
    assert np.allclose(around, (np.exp(lam * z) - 1) / lam, atol=1e-12)
    assert np.allclose(missing, np.exp(lam * z) / lam, atol=1e-12)


def test_auto_contour_refused_when_not_simply_connected():
    with pytest.raises(DomainObstruction):
        operator.apply(operator.reciprocal_symbol(), EntireFn.exp(1.0), 0.0)


@pytest.mark.parametrize("n", [1, 10, 64])
def test_noncontinuity_witness(n):
    sup, out = operator.noncontinuity_witness(n)
    assert abs(out - 2 * n) < 1e-9 * n
    assert sup == pytest.approx(2 * math.sinh(1 / n), rel=1e-6)


def test_linearity():
    f = symbols.shifted_zeta_symbol(2.5)
    a = EntireFn.from_terms([((1, 2), 0.3)])
    b = EntireFn.from_terms([((0.5j,), -0.2 + 0.1j)])
    t = np.linspace(0, 2, 4)
    lhs = operator.apply(f, a + b * 3.0, t)
    rhs = operator.apply(f, a, t) + 3.0 * operator.apply(f, b, t)
    assert np.allclose(lhs, rhs, rtol=1e-12)
