import math

import numpy as np
import pytest

from borelcalc import operator, solver, symbols
from borelcalc.errors import ShapeError
from borelcalc.exptype import EntireFn

GRID = np.linspace(0, 2, 21)


def test_first_order_particular_solution():
    f = symbols.poly_symbol([-3, 1])  # D - 3
    g = EntireFn.exp(1.0)
    phi = solver.particular_solution(f, g)
    t = np.array([0.0, 1.0])
    # any solution differs from -e^t/2 by a multiple of e^{3t}
    diff = phi(t) + np.exp(t) / 2
    assert abs(diff[1] - diff[0] * math.e**3) < 1e-12


def test_basis_for_cubic():
    f = symbols.poly_symbol([0, 0, -1, 1])  # s^2 (s - 1)
    basis = solver.homogeneous_basis(f, 2.0)
    assert [(round(s.real, 8), m) for s, m in basis] == [(0.0, 2), (1.0, 1)]


def test_basis_radius_is_strict():
    f = symbols.poly_symbol([0, 0, -1, 1])
    assert [m for _, m in solver.homogeneous_basis(f, 1.0)] == [2]


@pytest.mark.parametrize("coeffs", [None, [[1, 2], [0.5]]])
def test_assemble_residual_cubic(coeffs):
    f = symbols.poly_symbol([0, 0, -1, 1])
    b = solver.assemble(f, EntireFn.exp(2.0), coeffs, tau=2.0, grid=GRID)
    assert b.dimension == 3
    assert b.residual_report["max"] <= 1e-7


def test_homogeneous_terms_are_annihilated(catalog):
    f = symbols.shifted_zeta_symbol(3.0)
    basis = solver.homogeneous_basis(f, 3.0, catalog=catalog)
    assert sum(m for _, m in basis) == 4
    for s, m in basis:
        for j in range(m):
            assert np.max(np.abs(operator.apply(f, solver.monomial(s, j), GRID))) <= 1e-8


def test_assemble_zeta_symbol(catalog):
    f = symbols.shifted_zeta_symbol(3.0)
    g = EntireFn.from_terms([((1, 1), 0.5)])
    b = solver.assemble(f, g, [[1], [0.5j], [0], [2]], tau=3.0, catalog=catalog, grid=GRID)
    assert b.residual_report["max"] <= 1e-7
    assert b.to_json()["dimension"] == 4


def test_shape_errors():
    f = symbols.poly_symbol([0, 0, -1, 1])
    with pytest.raises(ShapeError):
        solver.assemble(f, EntireFn.exp(2.0), [[1]], tau=2.0)
    with pytest.raises(ShapeError):
        solver.assemble(f, EntireFn.exp(2.0), [[1, 2, 3], [1]], tau=2.0)


def test_negative_control_residual_detects_wrong_solution():
    f = symbols.poly_symbol([-3, 1])
    g = EntireFn.exp(1.0)
    b = solver.assemble(f, g, tau=1.0, grid=GRID)
    wrong = solver.SolutionBundle(f, EntireFn.exp(1.0, 2.0), b.particular, b.homog_terms)
    assert np.max(solver.residual(f, wrong, GRID)) > 0.5


def test_zero_rhs_gives_pure_homogeneous_solution():
    f = symbols.poly_symbol([0, 0, -1, 1])
    b = solver.assemble(f, EntireFn(()), [[1, 2], [3]], tau=2.0, grid=GRID)
    assert np.allclose(b(GRID), 1 + 2 * GRID + 3 * np.exp(GRID), atol=1e-12)
    assert b.residual_report["max"] <= 1e-9


def test_eigen_consistency_when_no_zero_enclosed():
    f = symbols.shifted_zeta_symbol(5.0)
    lam = 0.7
    t = np.linspace(0, 1, 5)
    got = solver.solve_particular(f, EntireFn.exp(lam), t)
    assert np.allclose(got, np.exp(lam * t) / operator.apply_eigen(f, lam), rtol=1e-9)
