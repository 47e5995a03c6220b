"""Entire functions of exponential type, their Borel transforms and the
Polya representation ``phi(z) = (1/2 pi i) int_gamma e^{sz} B(phi)(s) ds``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from . import contours
from .errors import (DegenerateFunction, InvalidContour, InvalidGeometry,
                     OutsideDomain)


def _as_complex_tuple(xs):
    return tuple(complex(x) for x in xs)


@dataclass(frozen=True)
class EntireFn:
    """``sum_k p_k(z) exp(lambda_k z)`` and/or a truncated power series.

    ``terms`` holds ``(coeffs, lam)`` pairs with polynomial coefficients in
    ascending order.  ``series`` holds Taylor coefficients at 0.
    """

    terms: tuple = ()
    series: Optional[tuple] = None
    declared_type: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        terms = []
        for coeffs, lam in self.terms:
            c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
            if c.size:
                terms.append((tuple(complex(x) for x in c), complex(lam)))
        object.__setattr__(self, "terms", tuple(terms))
        if self.series is not None:
            object.__setattr__(self, "series", _as_complex_tuple(self.series))
        lams = [lam for _, lam in self.terms]
        if len(set(lams)) != len(lams):
            raise ValueError("exponents must be pairwise distinct")
        if self.declared_type is not None and lams:
            if self.declared_type < max(abs(l) for l in lams) - 1e-12:
                raise ValueError("declared type is below max |lambda|")
        if self.terms and self.series is not None:
            rng = np.random.default_rng(16)
            z = np.sqrt(rng.uniform(0, 1, 16)) * np.exp(2j * np.pi * rng.uniform(0, 1, 16))
            a = self._eval_terms(z)
            b = np.polyval(self.series[::-1], z)
            if np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)) > 1e-8:
                raise ValueError("term and series representations disagree")
        if not self.terms and self.series is None:
            object.__setattr__(self, "terms", ())

    # construction helpers
    @classmethod
    def exp(cls, lam, coeff=1.0):
        return cls((((coeff,), lam),), label=f"exp({complex(lam)})")

    @classmethod
    def from_terms(cls, terms, declared_type=None, label=""):
        merged = {}
        for coeffs, lam in terms:
            lam = complex(lam)
            c = np.asarray(coeffs, dtype=complex)
            old = merged.get(lam, np.zeros(0, dtype=complex))
            n = max(len(old), len(c))
            merged[lam] = np.pad(old, (0, n - len(old))) + np.pad(c, (0, n - len(c)))
        return cls(tuple((tuple(v), k) for k, v in merged.items()), None, declared_type, label)

    @classmethod
    def from_series(cls, coeffs, declared_type=None, label=""):
        return cls((), tuple(coeffs), declared_type, label)

    @property
    def has_terms(self):
        return bool(self.terms) or self.series is None

    @property
    def exponents(self):
        return tuple(lam for _, lam in self.terms)

    @property
    def type(self):
        if self.declared_type is not None:
            return float(self.declared_type)
        if self.has_terms:
            return max((abs(l) for l in self.exponents), default=0.0)
        return estimate_type(self.series)

    def _eval_terms(self, z):
        out = np.zeros(np.shape(z), dtype=complex)
        for coeffs, lam in self.terms:
            out += np.polyval(coeffs[::-1], z) * np.exp(lam * z)
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.has_terms:
            out = self._eval_terms(z)
        else:
            out = np.polyval(self.series[::-1], z)
        return out if out.ndim else complex(out[()])

    def derivative(self, k=1):
        f = self
        for _ in range(k):
            if f.has_terms:
                new = []
                for coeffs, lam in f.terms:
                    c = np.asarray(coeffs)
                    d = lam * c
                    d[:-1] += np.arange(1, len(c)) * c[1:]
                    new.append((tuple(d), lam))
                f = EntireFn(tuple(new), None, f.declared_type)
            else:
                c = np.asarray(f.series)
                f = EntireFn((), tuple(np.arange(1, len(c)) * c[1:]) or (0j,), f.declared_type)
        return f

    def __add__(self, other):
        if not (self.has_terms and other.has_terms):
            raise NotImplementedError("addition needs term representations")
        return EntireFn.from_terms(self.terms + other.terms)

    def __mul__(self, scalar):
        return EntireFn(tuple((tuple(np.asarray(c) * scalar), lam) for c, lam in self.terms),
                        None if self.series is None else tuple(np.asarray(self.series) * scalar),
                        self.declared_type)

    __rmul__ = __mul__

    def taylor_coeffs(self, n):
        """Taylor coefficients a_0..a_{n-1} at the origin."""
        if not self.has_terms:
            s = np.zeros(n, dtype=complex)
            m = min(n, len(self.series))
            s[:m] = self.series[:m]
            return s
        k = np.arange(n)
        out = np.zeros(n, dtype=complex)
        for coeffs, lam in self.terms:
            if lam == 0:
                e = (k == 0).astype(complex)
            else:
                e = np.exp(k * np.log(lam + 0j) - gammaln(k + 1))
            out += np.convolve(np.asarray(coeffs), e)[:n]
        return out

    def to_json(self):
        out = {"terms": [{"poly": [[c.real, c.imag] for c in coeffs],
                          "lambda": [lam.real, lam.imag]} for coeffs, lam in self.terms]}
        if self.series is not None:
            out["series"] = [[c.real, c.imag] for c in self.series]
        out["type"] = self.declared_type if self.declared_type is not None else "unknown"
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data):
        terms = tuple((tuple(complex(*c) for c in t["poly"]), complex(*t["lambda"]))
                      for t in data.get("terms", []))
        series = data.get("series")
        if series is not None:
            series = tuple(complex(*c) if isinstance(c, list) else complex(c) for c in series)
        tau = data.get("type", "unknown")
        return cls(terms, series, None if tau == "unknown" else float(tau), data.get("label", ""))


@dataclass(frozen=True)
class Singularity:
    location: complex
    kind: str = "pole"
    order: int = 1


@dataclass(frozen=True)
class BorelFn:
    """A function holomorphic near infinity and vanishing there.

    ``support`` optionally names a path carrying a non-isolated singular set
    (a Cauchy-type integral over that path).
    """

    evaluator: Callable
    singularities: tuple = ()
    conjugate_diagram_radius: float = 0.0
    support: Optional[contours.Contour] = None
    label: str = ""

    def __call__(self, z):
        return self.evaluator(z)

    def singular_points(self, samples=32):
        pts = [s.location for s in self.singularities]
        if self.support is not None:
            pts += list(self.support.sample(samples))
        return np.asarray(pts, dtype=complex)

    def check_invariants(self):
        r = max(self.conjugate_diagram_radius, 1.0)
        probe = (2 * r + 1) * np.exp(2j * np.pi * np.arange(16) / 16)
        if not np.all(np.isfinite(self.evaluator(probe))):
            raise ValueError("Borel transform not finite at probe points")
        far = 1e6 * np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)
        if np.max(np.abs(self.evaluator(far))) >= 1e-3:
            raise ValueError("Borel transform does not vanish at infinity")
        return True

    def __add__(self, other):
        return BorelFn(lambda z: self.evaluator(z) + other.evaluator(z),
                       self.singularities + other.singularities,
                       max(self.conjugate_diagram_radius, other.conjugate_diagram_radius),
                       self.support or other.support)

    def __mul__(self, scalar):
        return BorelFn(lambda z: scalar * self.evaluator(z), self.singularities,
                       self.conjugate_diagram_radius, self.support, self.label)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ContourMeasure:
    """``density(s) ds / (2 pi i)`` on ``support``."""

    support: contours.Contour
    density: Callable


# --- order and type ---------------------------------------------------------

def _window(series):
    a = np.asarray(series, dtype=complex)
    if a.size < 9:
        raise ValueError("need at least 9 coefficients (N >= 8)")
    if not np.any(a != 0):
        raise DegenerateFunction("all coefficients vanish")
    n = np.arange(a.size)
    lo = max(1, (a.size - 1) // 2)
    sel = (n >= lo) & (a != 0)
    return n[sel], np.log(np.abs(a[sel])) + gammaln(n[sel] + 1)


def estimate_order(series: Sequence[complex]) -> float:
    """Order rho of an entire function from Taylor coefficients a_0..a_N.

    Fits ``ln|phi^(n)(0)| / n`` against ``ln n`` over n in [N/2, N] (upper
    envelope, blocks of 4); the slope is ``1 - 1/rho``.  Polynomials give 0.
    """
    n, u = _window(series)
    if n.size == 0:
        return 0.0
    x, y = [], []
    for start in range(0, n.size, 4):
        blk = slice(start, start + 4)
        k = int(np.argmax(u[blk] / n[blk]))
        x.append(math.log(n[blk][k]))
        y.append(u[blk][k] / n[blk][k])
    if len(x) < 2:
        x = list(np.log(n))
        y = list(u / n)
    if len(x) < 2:
        return 1.0
    slope = np.polyfit(x, y, 1)[0]
    if slope >= 1:
        return math.inf
    return float(1.0 / (1.0 - slope))


def estimate_type(series: Sequence[complex]) -> float:
    """max over n in [N/2, N] of |phi^(n)(0)|**(1/n); 0 for polynomials."""
    n, u = _window(series)
    if n.size == 0:
        return 0.0
    return float(np.max(np.exp(u / n)))


# --- Borel transform --------------------------------------------------------

def borel_exact(f: EntireFn) -> BorelFn:
    """Rational Borel transform of an exp-polynomial:
    ``z^d e^{lam z}`` maps to ``d! / (z - lam)^(d+1)``."""
    if not f.has_terms:
        raise ValueError("borel_exact needs the term representation")
    terms = [(np.asarray(c) * np.array([math.factorial(d) for d in range(len(c))]), lam)
             for c, lam in f.terms]

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, lam in terms:
            w = 1.0 / (z - lam)
            p = w.copy()
            for cd in c:
                out += cd * p
                p = p * w
        return out if out.ndim else complex(out[()])

    sing = tuple(Singularity(lam, "pole", len(c)) for c, lam in f.terms)
    radius = max((abs(lam) for _, lam in f.terms), default=0.0)
    return BorelFn(evaluate, sing, radius, None, f"B({f.label})" if f.label else "")


def borel_series(series: Sequence[complex], z, full_output=False):
    """Borel transform sum a_n n! / z^(n+1) from Taylor coefficients.

    Requires |z| > 1.1 * estimated type.  The remainder estimate treats the
    tail as geometric with ratio type/|z|.
    """
    a = np.asarray(series, dtype=complex)
    tau = estimate_type(a)
    z = complex(z)
    if abs(z) <= 1.1 * tau:
        raise OutsideDomain("point is inside the convergence barrier", z=z, barrier=1.1 * tau)
    n = np.arange(a.size)
    nz = a != 0
    t = np.zeros(a.size, dtype=complex)
    t[nz] = a[nz] * np.exp(gammaln(n[nz] + 1) - (n[nz] + 1) * np.log(z))
    value = complex(np.sum(t))
    q = tau / abs(z)
    last = float(np.max(np.abs(t[-4:])))
    err = last * q / (1 - q) if q > 0 else 0.0
    return (value, err) if full_output else value


# --- Polya reconstruction ---------------------------------------------------

def default_contour(b_or_f, margin=1.25, floor=0.5) -> contours.Contour:
    """Circle of radius ``margin * type`` (at least ``floor``) about 0."""
    tau = b_or_f.conjugate_diagram_radius if isinstance(b_or_f, BorelFn) else b_or_f.type
    return contours.circle(0, max(margin * tau, floor))


def check_encloses(gamma: contours.Contour, points, label="singularity"):
    """Raise InvalidContour unless ``gamma`` winds once around each point."""
    if not gamma.closed:
        raise InvalidContour("contour must be closed")
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    if pts.size == 0:
        return
    scale = max(1.0, float(np.max(np.abs(gamma.sample(16)))))
    dist = np.min(np.abs(gamma.sample(256)[:, None] - pts[None, :]), axis=0)
    if np.min(dist) < 1e-9 * scale:
        raise InvalidContour(f"contour passes through a {label}", at=complex(pts[np.argmin(dist)]))
    for p in pts:
        if contours.winding_number(gamma, p) != 1:
            raise InvalidContour(f"contour does not enclose the {label} once, positively",
                                 at=complex(p))


def polya_reconstruct(b: BorelFn, gamma: Optional[contours.Contour], z,
                      cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD, full_output=False):
    """phi(z) = (1/2 pi i) int_gamma e^{sz} b(s) ds; ``z`` may be an array."""
    if gamma is None:
        gamma = default_contour(b)
    check_encloses(gamma, b.singular_points())
    z = np.asarray(z, dtype=complex)
    zf = np.atleast_1d(z).ravel()
    res = contours.integrate(lambda s: np.exp(zf[:, None] * s[None, :]) * b(s)[None, :], gamma, cfg)
    val = np.asarray(res.value).reshape(z.shape) / contours.TWO_PI_I
    val = val if val.ndim else complex(val[()])
    if full_output:
        return val, res.error / (2 * math.pi)
    return val


def p_transform(mu: ContourMeasure, z, cfg: contours.QuadratureConfig = contours.DEFAULT_QUAD):
    """P(mu)(z) = int e^{sz} density(s) ds/(2 pi i)."""
    z = np.asarray(z, dtype=complex)
    zf = np.atleast_1d(z).ravel()
    res = contours.integrate(lambda s: np.exp(zf[:, None] * s[None, :]) * np.asarray(mu.density(s))[None, :],
                             mu.support, cfg)
    val = np.asarray(res.value).reshape(z.shape) / contours.TWO_PI_I
    return val if val.ndim else complex(val[()])


def total_variation(mu: ContourMeasure, n=256) -> float:
    """int |density(s)| |ds| / (2 pi)."""
    s, w = mu.support.nodes(n)
    return float(np.sum(np.abs(mu.density(s)) * np.abs(w)) / (2 * math.pi))
