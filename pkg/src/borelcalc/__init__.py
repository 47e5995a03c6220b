"""Exponential-type functions, Borel transforms and analytic symbols of the
derivative, with a solver for zeta(d^2/dt^2 + h) phi = g."""

__version__ = "0.1.0"

from . import contours, errors, exptype, operator, solver, symbols, zerofinder, zetasolver
from .contours import Contour, QuadratureConfig, angular_contour, circle, count_zeros, integrate, rectangle
from .errors import BorelCalcError
from .exptype import BorelFn, EntireFn, borel_exact, borel_series, polya_reconstruct
from .operator import apply, apply_eigen, apply_series
from .symbols import SymbolSpec, omega_for_h, parse_symbol, zeta, zeta_shifted

__all__ = [
    "Contour", "QuadratureConfig", "angular_contour", "circle", "count_zeros", "integrate",
    "rectangle", "BorelCalcError", "BorelFn", "EntireFn", "borel_exact", "borel_series",
    "polya_reconstruct", "apply", "apply_eigen", "apply_series", "SymbolSpec", "omega_for_h",
    "parse_symbol", "zeta", "zeta_shifted", "contours", "errors", "exptype", "operator",
    "solver", "symbols", "zerofinder", "zetasolver",
]
