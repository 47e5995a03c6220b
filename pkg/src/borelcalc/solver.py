"""Solutions of ``f(d/dt) phi = g``: a particular solution through
``B(g)/f``, homogeneous terms from the zeros of ``f``, and assembly with a
residual check."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import contours, operator, symbols, zerofinder
from .errors import (CertificationRequired, DomainObstruction, PinchError, ShapeError)
from .exptype import BorelFn, EntireFn, borel_exact

MIN_ABS_F = 1e-6
DEFAULT_GRID = np.linspace(0.0, 2.0, 21)
RESIDUAL_TOL = 1e-7


def _scaled(path: contours.Contour, kind: str, factor: float, center: complex):
    """A copy of an auto-chosen circle or box grown about ``center``."""
    if kind in ("circle", "given") and all(s.kind == "arc" for s in path.segments):
        seg = path.segments[0]
        return contours.circle(seg.center, seg.radius * factor)
    pts = [s.start for s in path.segments]
    lo = complex(min(p.real for p in pts), min(p.imag for p in pts))
    hi = complex(max(p.real for p in pts), max(p.imag for p in pts))
    return contours.rectangle(center + (lo - center) * factor, center + (hi - center) * factor)


def _center(path):
    if all(s.kind == "arc" for s in path.segments):
        return path.segments[0].center
    pts = [s.start for s in path.segments]
    return complex(np.mean(pts))


@dataclass(frozen=True)
class ParticularSolution:
    """phi(t) = (1/2 pi i) int_gamma e^{t eta} B(g)(eta) / f(eta) d eta."""

    symbol: symbols.SymbolSpec
    rhs: EntireFn
    gamma: contours.Contour
    outer: contours.Contour
    cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD

    def __call__(self, t):
        bg = borel_exact(self.rhs)
        t = np.asarray(t, dtype=complex)
        tf = np.atleast_1d(t).ravel()
        res = contours.integrate(
            lambda s: np.exp(tf[:, None] * s[None, :]) * (bg(s) / self.symbol(s))[None, :],
            self.gamma, self.cfg)
        val = np.asarray(res.value).reshape(t.shape) / contours.TWO_PI_I
        return val if val.ndim else complex(val[()])

    @property
    def borel(self) -> BorelFn:
        """B(phi)(z) = (1/2 pi i) int_gamma B(g)(eta) / (f(eta) (z - eta)) d eta,
        holomorphic outside ``gamma``."""
        bg = borel_exact(self.rhs)
        f, gamma, cfg = self.symbol, self.gamma, self.cfg

        def evaluate(z):
            z = np.asarray(z, dtype=complex)
            zf = np.atleast_1d(z).ravel()
            res = contours.integrate(
                lambda s: (bg(s) / f(s))[None, :] / (zf[:, None] - s[None, :]), gamma, cfg)
            val = np.asarray(res.value).reshape(z.shape) / contours.TWO_PI_I
            return val if val.ndim else complex(val[()])

        radius = float(np.max(np.abs(gamma.sample(64))))
        return BorelFn(evaluate, (), radius, gamma, "B(particular)")

    @property
    def pair(self):
        return self.borel, self.outer


def particular_solution(f: symbols.SymbolSpec, g: EntireFn,
                        cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD,
                        gamma: Optional[contours.Contour] = None) -> ParticularSolution:
    """Choose gamma around the singularities of B(g), inside the domain of f
    and away from its zeros, and return the particular solution."""
    bg = borel_exact(g)
    if gamma is None:
        base, kind = operator.choose_contour(f, bg)
        center = _center(base)
        gamma = None
        worst = None
        for k in range(0, 11):
            for sign in ((1,) if k == 0 else (1, -1)):
                cand = _scaled(base, kind, 1 + sign * 0.02 * k, center)
                if not operator._admissible(f, cand, bg.singular_points()):
                    continue
                z = cand.sample(256)
                vals = np.abs(f(z))
                if float(np.min(vals)) > MIN_ABS_F:
                    gamma = cand
                    break
                worst = complex(z[int(np.argmin(vals))])
            if gamma is not None:
                break
        if gamma is None:
            raise PinchError("every candidate contour passes through a zero of the symbol",
                             near_zero=worst)
    else:
        kind = "user"
        operator.check_encloses(gamma, bg.singular_points())
    outer = None
    center = _center(gamma)
    for factor in (1.1, 1.05, 1.02):
        cand = _scaled(gamma, "circle" if all(s.kind == "arc" for s in gamma.segments) else "rectangle",
                       factor, center)
        if f.omega.admits(cand) and operator._pole_clear(f, cand, 1e-6):
            outer = cand
            break
    if outer is None:
        raise DomainObstruction("no room in the domain for a contour enclosing the particular "
                                "solution's singular set")
    return ParticularSolution(f, g, gamma, outer, cfg)


def solve_particular(f: symbols.SymbolSpec, g: EntireFn, t,
                     cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    return particular_solution(f, g, cfg)(t)


def homogeneous_basis(f: symbols.SymbolSpec, tau: float,
                      zeros: Optional[Sequence[zerofinder.ZeroRecord]] = None,
                      catalog: Optional[zerofinder.ZetaZeroCatalog] = None):
    """[(s_k, m_k)] for the zeros of f with |s_k| < tau (strict)."""
    if zeros is None:
        zeros = zerofinder.find_zeros(f, tau, catalog)
    out = []
    for r in zeros:
        if not r.certified:
            raise CertificationRequired("zero is not certified", at=r.location)
        if abs(r.location) < tau:
            if abs(complex(f(np.array([r.location]))[0])) > 1e-8:
                raise CertificationRequired("zero has a residual above 1e-8", at=r.location)
            out.append((complex(r.location), int(r.multiplicity)))
    out.sort(key=lambda p: (round(abs(p[0]), 12), round(p[0].imag, 12), round(p[0].real, 12)))
    return out


def monomial(s, j) -> EntireFn:
    """t**j * exp(s t)."""
    return EntireFn((((0,) * j + (1,), complex(s)),))


@dataclass
class SolutionBundle:
    symbol: symbols.SymbolSpec
    rhs: EntireFn
    particular: ParticularSolution
    homog_terms: List[tuple]
    residual_report: dict = field(default_factory=dict)
    boundary_zeros: List[complex] = field(default_factory=list)

    @property
    def dimension(self):
        return sum(m for _, m, _ in self.homog_terms)

    def homogeneous(self) -> EntireFn:
        terms = [(tuple(p), s) for s, _, p in self.homog_terms if np.any(np.asarray(p) != 0)]
        return EntireFn.from_terms(terms) if terms else EntireFn(())

    def __call__(self, t):
        return self.particular(t) + self.homogeneous()(t)

    def to_json(self):
        cx = lambda z: [complex(z).real, complex(z).imag]
        return {
            "symbol": self.symbol.label,
            "rhs": self.rhs.to_json(),
            "particular": {"contour": self.particular.gamma.to_json(),
                           "outer_contour": self.particular.outer.to_json()},
            "homogeneous": [{"s": cx(s), "multiplicity": m, "poly": [cx(c) for c in p]}
                            for s, m, p in self.homog_terms],
            "dimension": self.dimension,
            "boundary_zeros": [cx(z) for z in self.boundary_zeros],
            "residual": {"grid": [float(np.real(x)) for x in self.residual_report.get("grid", [])],
                         "max": self.residual_report.get("max"),
                         "tolerance": self.residual_report.get("tolerance")},
        }


def residual(f: symbols.SymbolSpec, bundle: SolutionBundle, grid,
             cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """|f(d/dt) phi - g| on ``grid``, applying f to each piece separately."""
    grid = np.asarray(grid, dtype=complex)
    lhs = np.asarray(operator.apply(f, bundle.particular.pair, grid, cfg=cfg))
    for s, m, p in bundle.homog_terms:
        for j, c in enumerate(p):
            if c != 0:
                lhs = lhs + c * np.asarray(operator.apply(f, monomial(s, j), grid, cfg=cfg))
    return np.abs(lhs - bundle.rhs(grid))


def assemble(f: symbols.SymbolSpec, g: EntireFn, free_coefficients=None, tau: float = 1.0,
             zeros=None, catalog=None, grid=None, tol: float = RESIDUAL_TOL,
             cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD) -> SolutionBundle:
    """General solution: particular part plus sum p_k(t) e^{s_k t} with the
    caller's polynomial coefficients (default all zero)."""
    if zeros is None:
        zeros = zerofinder.find_zeros(f, tau * (1 + 1e-9), catalog)
    basis = homogeneous_basis(f, tau, zeros)
    boundary = [complex(r.location) for r in zeros if abs(abs(r.location) - tau) <= 1e-12 * max(1, tau)]
    if free_coefficients is None:
        free_coefficients = [[0] * m for _, m in basis]
    if len(free_coefficients) != len(basis):
        raise ShapeError("need one coefficient list per basis zero",
                         expected=len(basis), got=len(free_coefficients))
    terms = []
    for (s, m), p in zip(basis, free_coefficients):
        p = [complex(c) for c in np.atleast_1d(p)]
        if len(p) > m:
            raise ShapeError("polynomial degree must stay below the multiplicity",
                             zero=s, multiplicity=m, got=len(p))
        terms.append((s, m, tuple(p + [0j] * (m - len(p)))))
    part = particular_solution(f, g, cfg)
    bundle = SolutionBundle(f, g, part, terms, boundary_zeros=boundary)
    grid = DEFAULT_GRID if grid is None else np.asarray(grid)
    res = residual(f, bundle, grid, cfg)
    bundle.residual_report = {"grid": list(np.real(grid)), "max": float(np.max(res)) if res.size else 0.0,
                              "tolerance": tol, "values": res}
    return bundle
