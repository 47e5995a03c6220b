"""Symbols of the derivative acting on exponential-type functions:
``f(d/dt) phi(t) = (1/2 pi i) int_gamma e^{st} f(s) B(phi)(s) ds``."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import contours, symbols
from .errors import (DiscViolation, DomainObstruction, InvalidContour, OutsideDomain,
                     PoleError)
from .exptype import BorelFn, EntireFn, borel_exact, check_encloses

log = logging.getLogger(__name__)

POLE_CLEARANCE = 0.05
RECT_MARGIN = 0.2

Operand = Union[EntireFn, Tuple[BorelFn, contours.Contour]]


@dataclass(frozen=True)
class ApplyResult:
    value: object
    error: float
    contour: contours.Contour
    contour_kind: str


def _borel_of(phi: Operand):
    if isinstance(phi, EntireFn):
        return borel_exact(phi), None
    b, gamma = phi
    return b, gamma


def _pole_clear(f: symbols.SymbolSpec, path: contours.Contour, clearance=POLE_CLEARANCE):
    if not f.poles:
        return True
    z = path.sample(128)
    return float(np.min(np.abs(z[:, None] - np.asarray(f.poles)[None, :]))) > clearance


def _admissible(f, path, sing):
    if not (f.omega.admits(path) and _pole_clear(f, path)):
        return False
    try:
        check_encloses(path, sing)
    except InvalidContour:
        return False
    return True


def choose_contour(f: symbols.SymbolSpec, b: BorelFn, hint: Optional[contours.Contour] = None):
    """Pick a closed path in the domain of ``f`` around the singularities of
    ``b``: the hint, then a circle about 0, then a box around the singular set."""
    sing = b.singular_points()
    if not f.omega.simply_connected:
        raise DomainObstruction("domain is not simply connected; the result depends on the "
                                "contour, so one must be supplied", domain=f.omega.kind)
    inside = f.omega.contains(sing) if sing.size else np.array([], dtype=bool)
    if sing.size and not np.all(inside):
        bad = complex(sing[np.argmin(inside)])
        raise DomainObstruction("a singularity of the Borel transform lies outside the domain",
                                singularity=bad)
    if hint is not None and _admissible(f, hint, sing):
        return hint, "given"
    radius = max(1.25 * float(np.max(np.abs(sing))) if sing.size else 0.0, 0.5)
    circ = contours.circle(0, radius)
    if _admissible(f, circ, sing):
        return circ, "circle"
    if sing.size:
        m = min(RECT_MARGIN, 0.5 * float(np.min(f.omega.clearance(sing))))
        lo = complex(sing.real.min() - m, sing.imag.min() - m)
        hi = complex(sing.real.max() + m, sing.imag.max() + m)
        rect = contours.rectangle(lo, hi)
        if _admissible(f, rect, sing):
            return rect, "rectangle"
        clear = f.omega.clearance(sing)
        worst = complex(sing[int(np.argmin(clear))])
        raise DomainObstruction("no admissible contour: the singular set is too close to the "
                                "excluded set of the domain", singularity=worst)
    raise DomainObstruction("no admissible contour found")


def apply(f: symbols.SymbolSpec, phi: Operand, t, gamma: Optional[contours.Contour] = None,
          cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD, full_output=False):
    """``(1/2 pi i) int_gamma e^{st} f(s) B(phi)(s) ds``, vectorized over ``t``.

    ``phi`` is an exp-polynomial EntireFn or a ``(BorelFn, contour)`` pair.
    Without ``gamma`` a contour is chosen automatically.
    """
    b, hint = _borel_of(phi)
    if gamma is None:
        gamma, kind = choose_contour(f, b, hint)
    else:
        kind = "user"
        check_encloses(gamma, b.singular_points())
        if not f.omega.admits(gamma):
            raise InvalidContour("contour leaves the symbol's domain", contour=gamma.label)
        if not _pole_clear(f, gamma, 1e-9 * max(1.0, gamma.length)):
            raise InvalidContour("contour passes through a pole of the symbol")
    t = np.asarray(t, dtype=complex)
    tf = np.atleast_1d(t).ravel()

    def density(s):
        return np.exp(tf[:, None] * s[None, :]) * (f(s) * b(s))[None, :]

    res = contours.integrate(density, gamma, cfg)
    val = np.asarray(res.value).reshape(t.shape) / contours.TWO_PI_I
    val = val if val.ndim else complex(val[()])
    if full_output:
        return ApplyResult(val, res.error / (2 * math.pi), gamma, kind)
    return val


def apply_eigen(f: symbols.SymbolSpec, lam) -> complex:
    """Multiplier f(lam) with f(d/dt) e^{lam t} = f(lam) e^{lam t}."""
    lam = complex(lam)
    for p in f.poles:
        if abs(lam - p) < 1e-12:
            raise PoleError("exponent sits on a pole of the symbol", at=lam)
    if not f.omega.contains(lam):
        raise OutsideDomain("exponent lies outside the symbol's domain", at=lam)
    return complex(f(np.array([lam]))[0])


def apply_series(taylor: Sequence[complex], phi: EntireFn, t, radius: float = math.inf,
                 rtol: float = 1e-12, full_output=False):
    """Partial sums of ``sum_k a_k phi^(k)(t)`` for exp-polynomial ``phi``.

    All exponents must lie in the disc |s| < radius where the Taylor series
    converges.  Summation stops once two consecutive increments fall below
    ``rtol`` times the partial sum.
    """
    if not phi.has_terms:
        raise ValueError("apply_series needs the term representation")
    lam_max = max((abs(l) for l in phi.exponents), default=0.0)
    if lam_max >= radius:
        raise DiscViolation("an exponent lies outside the Taylor disc", exponent=lam_max,
                            radius=radius)
    t = np.asarray(t, dtype=complex)
    total = np.zeros(t.shape, dtype=complex)
    d = phi
    quiet = 0
    last = np.inf
    used = 0
    for k, a in enumerate(taylor):
        inc = complex(a) * np.asarray(d(t))
        total = total + inc
        used = k + 1
        last = float(np.max(np.abs(inc)))
        quiet = quiet + 1 if last <= rtol * float(np.max(np.abs(total))) else 0
        if quiet >= 2:
            break
        d = d.derivative()
    val = total if total.ndim else complex(total[()])
    if full_output:
        return val, {"terms_used": used, "last_increment": last}
    return val


# --- cautionary examples ----------------------------------------------------

def reciprocal_symbol() -> symbols.SymbolSpec:
    """f(s) = 1/s on C minus the origin."""
    return symbols.SymbolSpec(lambda s: 1.0 / np.asarray(s, dtype=complex),
                              symbols.plane_minus_point(0.0), (0j,), "1/s",
                              params={"family": "recip"})


def slit_reciprocal_symbol() -> symbols.SymbolSpec:
    """f(s) = 1/s on C minus the ray [0, inf)."""
    omega = symbols.DomainDescriptor("plane-minus-rays", {"slit": "[0,inf)"}, ((0j, 1 + 0j),))
    return symbols.SymbolSpec(lambda s: 1.0 / np.asarray(s, dtype=complex), omega, (0j,),
                              "1/s (slit plane)", params={"family": "recip"})


def runge_contours(lam) -> Tuple[contours.Contour, contours.Contour]:
    """Two closed paths around ``lam``: the first also winds around 0, the
    second does not."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    return (contours.circle(0, abs(lam) + 1.0, label="around-origin"),
            contours.circle(lam, abs(lam) / 2, label="missing-origin"))


def runge_values(lam, z):
    """Apply 1/s to e^{lam t} along both Runge contours."""
    f = reciprocal_symbol()
    phi = EntireFn.exp(lam)
    a, b = runge_contours(lam)
    return apply(f, phi, z, gamma=a), apply(f, phi, z, gamma=b)


def _witness_contour(c):
    pts = [(-2 * c, -2 * c), (c, -2 * c), (c, -c / 2), (-c / 2, -c / 2), (-c / 2, c / 2),
           (c, c / 2), (c, 2 * c), (-2 * c, 2 * c)]
    return contours.polygon([complex(x, y) for x, y in pts], True, "notched-square")


def noncontinuity_witness(n: int, cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """Input sup-norm on the unit disc and output size at 0 for
    phi_n = e^{iz/n} - e^{-iz/n} under 1/s on the slit plane C minus [0, inf).

    The output equals 2n while the input tends to 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c = 1.0 / n
    phi = EntireFn.from_terms([((1,), 1j * c), ((-1,), -1j * c)])
    f = slit_reciprocal_symbol()
    out = apply(f, phi, 0.0, gamma=_witness_contour(c), cfg=cfg)
    ring = np.exp(2j * np.pi * np.arange(4096) / 4096)
    sup = float(np.max(np.abs(phi(ring))))
    return sup, abs(out)
