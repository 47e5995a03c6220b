"""The equation ``zeta(d^2/dt^2 + h) phi = g`` for h > 1 and sources g with a
known Laplace transform, via truncated angular contours kappa_r.

    g_r(z)   = int_{kappa_r} e^{zs} L(g)(s) ds / (2 pi i)
    phi_r(z) = int_{kappa_r} e^{zs} L(g)(s) / zeta(s^2 + h) ds / (2 pi i)

``phi_r`` solves the truncated equation with right-hand side ``g_r``; as
``r`` grows both converge inside the sector |arg z| < psi - pi/2.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import gamma as gamma_fn

from . import contours, operator, symbols, zerofinder
from .errors import (InvalidAngle, InvalidGeometry, MultiplicityUnsupported,
                     NormalizationError, OutsideDomain, ScheduleExhausted, Unsupported)
from .exptype import BorelFn, EntireFn, estimate_type

log = logging.getLogger(__name__)

DEFAULT_PSI = 7 * math.pi / 8
DEFAULT_DELTA = 0.1
DEFAULT_SCHEDULE = (10.0, 20.0, 40.0, 80.0)
POLE_GAP = 0.05
_CHUNK = 256


@dataclass(frozen=True)
class LaplaceSource:
    """A source g on [0, inf) with its Laplace transform continued to an
    angular region; the first singularity of L(g) sits at 0."""

    name: str
    g: Callable
    laplace: Callable
    max_angle: float = math.pi
    first_singularity: complex = 0j
    notes: str = ""

    def __add__(self, other):
        return LaplaceSource(f"{self.name}+{other.name}",
                             lambda t: self.g(t) + other.g(t),
                             lambda s: self.laplace(s) + other.laplace(s),
                             min(self.max_angle, other.max_angle), 0j,
                             "; ".join(n for n in (self.notes, other.notes) if n))

    def check(self, points=(2.0, 3.0), tol=1e-6):
        """Compare L(g)(s) with a numerical Laplace integral at real ``points``."""
        for s in points:
            num, _ = sp_integrate.quad(lambda t: math.exp(-s * t) * float(np.real(self.g(t))),
                                       0, np.inf, limit=200)
            ref = complex(np.asarray(self.laplace(np.array([s + 0j])))[0])
            if abs(num - ref) > tol * max(1.0, abs(ref)):
                raise NormalizationError("Laplace transform does not match the source",
                                         s=s, numeric=num, closed_form=ref)
        return True


def _power_source(nu: float) -> LaplaceSource:
    if not nu > -1:
        raise ValueError("power sources need nu > -1")
    c = float(gamma_fn(nu + 1))
    return LaplaceSource(f"power:{nu:g}",
                         lambda t: np.power(np.asarray(t, dtype=float), nu),
                         lambda s: c * np.exp(-(nu + 1) * np.log(np.asarray(s, dtype=complex))),
                         math.pi, 0j, "principal branch of s**(nu+1), cut along (-inf, 0]")


def make_source(name: str) -> LaplaceSource:
    """Registry: 'one', 'power:nu', 'expdecay:b' (rejected), joined by '+'."""
    parts = [p.strip() for p in name.split("+") if p.strip()]
    if len(parts) > 1:
        out = make_source(parts[0])
        for p in parts[1:]:
            out = out + make_source(p)
        return out
    key, _, arg = name.strip().partition(":")
    if key == "one":
        return LaplaceSource("one", lambda t: np.ones_like(np.asarray(t, dtype=float)),
                             lambda s: 1.0 / np.asarray(s, dtype=complex), math.pi)
    if key == "power":
        return _power_source(float(arg))
    if key == "expdecay":
        b = float(arg)
        raise NormalizationError("the Laplace transform's first singularity must sit at 0; "
                                 "shifted sources are not implemented", singularity=-b)
    raise ValueError(f"unknown source {name!r}")


# --- the angular contour ------------------------------------------------------

def _check_psi(src: LaplaceSource, psi: float):
    if not (3 * math.pi / 4 < psi <= src.max_angle + 1e-15):
        raise InvalidAngle("half-angle must lie in (3 pi/4, psi(g)]", psi=psi,
                           max_angle=src.max_angle)


def kappa(psi: float, delta: float, r: float) -> contours.Contour:
    return contours.angular_contour(0j, psi, delta, r)


def resolve_delta(h: float, delta: Optional[float]) -> float:
    """Arc radius for kappa_r that keeps 0.05 away from the poles +-i sqrt(h-1).

    An explicit ``delta`` that is too large is an error; the default is shrunk.
    """
    c = math.sqrt(h - 1)
    limit = c - POLE_GAP
    if delta is None:
        if DEFAULT_DELTA <= limit:
            return DEFAULT_DELTA
        shrunk = c / 2
        log.info("default delta %.3g too close to the poles for h=%g; using %.3g",
                 DEFAULT_DELTA, h, shrunk)
        return shrunk
    if not delta <= limit:
        raise InvalidGeometry("the arc of kappa_r comes too close to a pole of zeta(s^2+h)",
                              delta=delta, suggested_delta=c / 2)
    return float(delta)


def _check_h(h: float):
    if not h > 1:
        raise Unsupported("h ≤ 1 unsupported in zeta-solve", h=h)


def _sector_ok(z, psi):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return (z == 0) | (np.abs(np.angle(z)) < psi - math.pi / 2)


def in_sector(z, psi: float) -> bool:
    """z in D_psi = {z != 0 : |arg z| < psi - pi/2}."""
    z = complex(z)
    return z != 0 and abs(math.atan2(z.imag, z.real)) < psi - math.pi / 2


def _contour_integral(density, path, z, cfg):
    z = np.asarray(z, dtype=complex)
    zf = np.atleast_1d(z).ravel()
    res = contours.integrate(lambda s: np.exp(zf[:, None] * s[None, :]) * density(s)[None, :],
                             path, cfg)
    val = np.asarray(res.value).reshape(z.shape) / contours.TWO_PI_I
    return (val if val.ndim else complex(val[()])), res.error / (2 * math.pi)


def g_r_eval(src: LaplaceSource, psi: float, delta: float, r: float, z,
             cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """g_r(z) = int_{kappa_r} e^{zs} L(g)(s) ds/(2 pi i)."""
    _check_psi(src, psi)
    if not np.all(_sector_ok(z, psi)):
        log.warning("g_r evaluated outside the sector |arg z| < psi - pi/2; "
                    "the ray integrand grows there")
    return _contour_integral(src.laplace, kappa(psi, delta, r), z, cfg)[0]


def borel_g_r(src: LaplaceSource, psi: float, delta: float, r: float, z,
              cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """B(g_r)(z) = int_{kappa_r} L(g)(s) / (z - s) ds/(2 pi i)."""
    _check_psi(src, psi)
    z = np.asarray(z, dtype=complex)
    zf = np.atleast_1d(z).ravel()
    res = contours.integrate(lambda s: src.laplace(s)[None, :] / (zf[:, None] - s[None, :]),
                             kappa(psi, delta, r), cfg)
    val = np.asarray(res.value).reshape(z.shape) / contours.TWO_PI_I
    return val if val.ndim else complex(val[()])


def g_r_moments(src: LaplaceSource, psi: float, delta: float, r: float, n: int = 64,
                cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """Derivatives g_r^(k)(0) = int_{kappa_r} s^k L(g)(s) ds/(2 pi i), k < n."""
    _check_psi(src, psi)
    k = np.arange(n)[:, None]
    res = contours.integrate(lambda s: s[None, :] ** k * src.laplace(s)[None, :],
                             kappa(psi, delta, r), cfg)
    return np.asarray(res.value) / contours.TWO_PI_I


def g_r_type(src: LaplaceSource, psi: float, delta: float, r: float, n: int = 64):
    """Exponential type of g_r estimated from its Taylor coefficients."""
    from scipy.special import gammaln
    m = g_r_moments(src, psi, delta, r, n + 1)
    k = np.arange(n + 1)
    series = np.where(m != 0, m * np.exp(-gammaln(k + 1)), 0)
    return estimate_type(series)


def _phi_density(src, h):
    return lambda s: src.laplace(s) / symbols.zeta_shifted(s, h)


def phi_r_particular(src: LaplaceSource, h: float, psi: float, delta: Optional[float], r: float,
                     z, cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """phi_r(z) = int_{kappa_r} e^{sz} L(g)(s) / zeta(s^2 + h) ds/(2 pi i)."""
    _check_h(h)
    _check_psi(src, psi)
    delta = resolve_delta(h, delta)
    return _contour_integral(_phi_density(src, h), kappa(psi, delta, r), z, cfg)[0]


# --- residue corrections ----------------------------------------------------

@dataclass(frozen=True)
class ResidueTerm:
    tau: complex
    coefficient: complex
    derivative: complex

    def __call__(self, z):
        return self.coefficient * np.exp(self.tau * np.asarray(z, dtype=complex))


def residue_terms(src: LaplaceSource, h: float, psi: float, delta: float, r: float,
                  zeros: Sequence[zerofinder.ZeroRecord],
                  cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD) -> List[ResidueTerm]:
    """c_j = int_{kappa_r} L(g)(w) / (zeta_j (tau_j - w)) dw/(2 pi i), with
    zeta_j the derivative of zeta(s^2 + h) at the simple zero tau_j."""
    out = []
    path = kappa(psi, delta, r)
    for rec in zeros:
        if rec.multiplicity != 1:
            raise MultiplicityUnsupported("residue terms need simple zeros", tau=rec.location,
                                          multiplicity=rec.multiplicity)
        tau = complex(rec.location)
        d = rec.derivative_at_zero
        if d is None:
            d = symbols.cauchy_derivative(lambda s: symbols.zeta_shifted(s, h), tau, 1e-3)
        res = contours.integrate(lambda w: src.laplace(w) / (tau - w), path, cfg)
        out.append(ResidueTerm(tau, complex(res.value) / (contours.TWO_PI_I * d), complex(d)))
    return out


def phi_r_general(src: LaplaceSource, h: float, psi: float, delta: Optional[float], r: float, z,
                  zeros: Optional[Sequence[zerofinder.ZeroRecord]] = None,
                  catalog: Optional[zerofinder.ZetaZeroCatalog] = None,
                  cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """Particular value plus residue terms for the zeros |tau_j| < r.

    Returns ``(value, terms)`` where ``value`` includes the corrections.
    """
    _check_h(h)
    _check_psi(src, psi)
    delta = resolve_delta(h, delta)
    if zeros is None:
        zeros = zerofinder.zeros_of_zeta_shifted(h, r, catalog)
    terms = residue_terms(src, h, psi, delta, r, zeros, cfg)
    value = phi_r_particular(src, h, psi, delta, r, z, cfg)
    for term in terms:
        value = value + term(z)
    return value, terms


# --- truncated equation -----------------------------------------------------

class _KappaRule:
    """Fixed Gauss-Legendre rule on kappa_r for Cauchy-type integrals."""

    def __init__(self, density, path, n=64):
        s, w = path.nodes(n)
        self.nodes = s
        self.weights = w * density(s) / contours.TWO_PI_I

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        zf = np.atleast_1d(z).ravel()
        out = np.empty(zf.shape, dtype=complex)
        for a in range(0, zf.size, _CHUNK):
            blk = zf[a:a + _CHUNK]
            out[a:a + _CHUNK] = (1.0 / (blk[:, None] - self.nodes[None, :])) @ self.weights
        out = out.reshape(z.shape)
        return out if out.ndim else complex(out[()])


def enclosing_contour(h: float, psi: float, delta: float, r: float) -> contours.Contour:
    """A closed path around kappa_r inside the domain of zeta(s^2 + h).

    Its small arc stays inside |s| < sqrt(h-1), its rays sit at an angle
    between 3 pi/4 and psi, and its outer arc runs at radius r + 1.
    """
    c = math.sqrt(h - 1)
    rho = 0.5 * (delta + c)
    alpha = 0.5 * (3 * math.pi / 4 + psi)
    return contours.sector_with_disc(alpha, rho, r + 1.0)


def borel_phi_r(src: LaplaceSource, h: float, psi: float, delta: float, r: float) -> BorelFn:
    """B(phi_r)(z) = int_{kappa_r} L(g)(s) / (zeta(s^2+h) (z - s)) ds/(2 pi i)."""
    path = kappa(psi, delta, r)
    rule = _KappaRule(_phi_density(src, h), path)
    return BorelFn(rule.cauchy, (), r, path, f"B(phi_r), r={r:g}")


def truncated_residual(src: LaplaceSource, h: float, psi: float, delta: Optional[float], r: float,
                       t, cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """|zeta(d^2/dt^2 + h) phi_r - g_r| at real ``t``, applying the symbol
    through the contour definition."""
    _check_h(h)
    _check_psi(src, psi)
    delta = resolve_delta(h, delta)
    sym = symbols.shifted_zeta_symbol(h)
    pair = (borel_phi_r(src, h, psi, delta, r), enclosing_contour(h, psi, delta, r))
    lhs = operator.apply(sym, pair, t, cfg=cfg)
    rhs = g_r_eval(src, psi, delta, r, t, cfg)
    return np.abs(np.asarray(lhs) - np.asarray(rhs))


@dataclass
class TruncatedPair:
    r: float
    psi: float
    delta: float
    contour: contours.Contour
    g_r: Callable
    phi_r: Callable
    n_r: Optional[int]
    residue_terms: list = field(default_factory=list)


def truncated_pair(src: LaplaceSource, h: float, psi: float = DEFAULT_PSI,
                   delta: Optional[float] = None, r: float = 10.0,
                   catalog: Optional[zerofinder.ZetaZeroCatalog] = None, with_residues=False,
                   cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD) -> TruncatedPair:
    _check_h(h)
    _check_psi(src, psi)
    delta = resolve_delta(h, delta)
    terms, n_r = [], None
    if with_residues:
        zeros = zerofinder.zeros_of_zeta_shifted(h, r, catalog)
        n_r = sum(z.multiplicity for z in zeros)
        terms = residue_terms(src, h, psi, delta, r, zeros, cfg)
    return TruncatedPair(
        r, psi, delta, kappa(psi, delta, r),
        lambda z: g_r_eval(src, psi, delta, r, z, cfg),
        lambda z: phi_r_particular(src, h, psi, delta, r, z, cfg),
        n_r, terms)


# --- the limit r -> infinity ------------------------------------------------

@dataclass
class ConvergenceReport:
    radii: list
    values: list
    gaps: list
    ratios: list
    decay_rate: Optional[float]
    converged_at: Optional[float]

    def to_json(self):
        cx = lambda v: [float(np.real(v)), float(np.imag(v))]
        return {"radii": self.radii, "values": [cx(v) for v in self.values],
                "gaps": self.gaps, "ratios": self.ratios, "decay_rate": self.decay_rate,
                "converged_at": self.converged_at}


def _schedule_values(density, psi, delta, z, schedule, cfg):
    """Values on kappa_r for each r, reusing the shorter contour and adding
    the two ray stubs between consecutive radii."""
    vals, gaps = [], []
    v, _ = _contour_integral(density, kappa(psi, delta, schedule[0]), z, cfg)
    vals.append(v)
    for r1, r2 in zip(schedule, schedule[1:]):
        inbound, outbound = contours.angular_stubs(0j, psi, r1, r2)
        a, _ = _contour_integral(density, inbound, z, cfg)
        b, _ = _contour_integral(density, outbound, z, cfg)
        v = v + a + b
        vals.append(v)
        gaps.append(float(np.max(np.abs(np.asarray(a + b)))))
    return vals, gaps


def _report(schedule, vals, gaps, tol):
    ratios = [gaps[k] / gaps[k - 1] if gaps[k - 1] > 0 else 0.0 for k in range(1, len(gaps))]
    rate = None
    pos = [(schedule[k + 1], g) for k, g in enumerate(gaps) if g > 0]
    if len(pos) >= 2:
        x, y = zip(*pos)
        rate = float(-np.polyfit(x, np.log(y), 1)[0])
    converged = next((schedule[k + 1] for k, g in enumerate(gaps) if g < tol), None)
    return ConvergenceReport(list(map(float, schedule)), vals, gaps, ratios, rate, converged)


def f_infinity(src: LaplaceSource, h: float, psi: float = DEFAULT_PSI, delta: Optional[float] = None,
               z=1.0, r_schedule: Sequence[float] = DEFAULT_SCHEDULE, tol: float = 1e-8,
               cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """Limit of phi_r(z) along ``r_schedule``; returns ``(value, report)``.

    Stops at the first radius where the increment drops below ``tol``.
    """
    _check_h(h)
    _check_psi(src, psi)
    delta = resolve_delta(h, delta)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if not all(in_sector(x, psi) for x in zs):
        bad = next(complex(x) for x in zs if not in_sector(x, psi))
        raise OutsideDomain("point lies outside the sector |arg z| < psi - pi/2", z=bad, psi=psi)
    schedule = sorted(float(r) for r in r_schedule)
    if len(schedule) < 2:
        raise ValueError("the radius schedule needs at least two entries")
    vals, gaps = _schedule_values(_phi_density(src, h), psi, delta, z, schedule, cfg)
    report = _report(schedule, vals, gaps, tol)
    if report.converged_at is None:
        raise ScheduleExhausted("increments stayed above the tolerance", best=vals[-1],
                                gaps=gaps, radii=schedule)
    k = schedule.index(report.converged_at)
    return vals[k], report


def check_source_recovery(src: LaplaceSource, psi: float = DEFAULT_PSI, delta: float = DEFAULT_DELTA,
                          t_grid=(0.5, 1.0, 2.0), r_schedule: Sequence[float] = DEFAULT_SCHEDULE,
                          cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """max_t |g_r(t) - g(t)| for each r in the schedule."""
    _check_psi(src, psi)
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0):
        raise ValueError("recovery grid must lie in (0, inf)")
    schedule = sorted(float(r) for r in r_schedule)
    vals, _ = _schedule_values(src.laplace, psi, delta, t.astype(complex), schedule, cfg)
    exact = np.asarray(src.g(t), dtype=float)
    errors = [float(np.max(np.abs(np.asarray(v) - exact))) for v in vals]
    return {"radii": schedule, "errors": errors, "final": errors[-1],
            "monotone": all(b <= a for a, b in zip(errors, errors[1:]))}
