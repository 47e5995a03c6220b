"""Analytic symbols: Riemann zeta, the shifted symbol ``zeta(s**2 + h)``,
Dirichlet series and simple user symbols, each paired with its domain."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import contours
from .errors import (InvalidSequence, OutsideDomain, PoleError, RadiusTooLarge)

# Bernoulli numbers B_2, B_4, ..., B_24 divided by (2k)!
_B2K = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
        43867 / 798, -174611 / 330, 854513 / 138, -236364091 / 2730]
_B2K_FACT = [b / math.factorial(2 * k + 2) for k, b in enumerate(_B2K)]

# Lanczos approximation, g = 671/128, 14 series terms plus the constant term
# (Numerical Recipes, 3rd ed., gammln).  Relative error below 1e-15 for Re(x) > 0.
_LANCZOS = np.array([
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, .339946499848118887e-4, .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3, -.210264441724104883e-3,
    .217439618115212643e-3, -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5])
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_SHIFT = 671 / 128
_SQRT_2PI = 2.5066282746310005

POLE_TOL = 1e-14
SHIFT_POLE_TOL = 1e-12
_FAST_SIGMA = 30.0


def loggamma(x):
    """A branch of log Gamma(x), vectorized.  Uses reflection for Re(x) < 0.5.

    The branch is not necessarily the principal one; ``exp(loggamma(x))``
    is Gamma(x) to about 1e-14 relative accuracy.
    """
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    left = x.real < 0.5
    out[~left] = _lanczos(x[~left])
    if np.any(left):
        xl = x[left]
        out[left] = math.log(math.pi) - np.log(sinpi(xl)) - _lanczos(1 - xl)
    return out if out.ndim else out[()]


def _lanczos(x):
    tmp = x + _LANCZOS_SHIFT
    tmp = (x + 0.5) * np.log(tmp) - tmp
    ser = np.full(x.shape, _LANCZOS_C0, dtype=complex)
    y = x.copy()
    for c in _LANCZOS:
        y = y + 1
        ser += c / y
    return tmp + np.log(_SQRT_2PI * ser / x)


def sinpi(z):
    """sin(pi z) with exact zeros at the integers."""
    z = np.asarray(z, dtype=complex)
    n = np.round(z.real)
    r = (z.real - n) + 1j * z.imag
    sign = np.where(np.mod(n, 2) == 0, 1.0, -1.0)
    out = sign * np.sin(np.pi * r)
    return np.where(r == 0, 0j, out)


def _em_sum(s, q, n_terms, n_bern=12):
    """Euler-Maclaurin value of sum_{k>=0} (k + q)**(-s); s is a 1-d array."""
    k = np.arange(n_terms, dtype=float)[:, None] + q
    head = np.sum(np.exp(-s[None, :] * np.log(k)), axis=0)
    big = n_terms + q
    lnb = math.log(big)
    tail = np.exp((1 - s) * lnb) / (s - 1) + 0.5 * np.exp(-s * lnb)
    term = s * np.exp(-(s + 1) * lnb)            # s N^{-s-1}
    for j in range(n_bern):
        tail = tail + _B2K_FACT[j] * term
        term = term * (s + 2 * j + 1) * (s + 2 * j + 2) / (big * big)
    return head + tail


def _zeta_em(s):
    """Euler-Maclaurin zeta on a 1-d array (any s away from 1)."""
    out = np.empty(s.shape, dtype=complex)
    fast = s.real >= _FAST_SIGMA
    if np.any(fast):
        out[fast] = _em_sum(s[fast], 1.0, 8, n_bern=1)
    rest = ~fast
    if np.any(rest):
        n = max(20, int(math.ceil(np.max(np.abs(s[rest].imag)))) + 20)
        out[rest] = _em_sum(s[rest], 1.0, n)
    return out


def zeta(s):
    """Riemann zeta function, vectorized over ``s``.

    Euler-Maclaurin summation for Re(s) >= 0.5 (and in a small disc around 0),
    the functional equation otherwise.
    """
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    if np.any(np.abs(flat - 1) < POLE_TOL):
        raise PoleError("zeta has a pole at s = 1", at=complex(flat[np.argmin(np.abs(flat - 1))]))
    out = np.empty(flat.shape, dtype=complex)
    direct = (flat.real >= 0.5) | (np.abs(flat) < 0.25)
    if np.any(direct):
        out[direct] = _zeta_em(flat[direct])
    refl = ~direct
    if np.any(refl):
        t = flat[refl]
        logf = t * math.log(2) + (t - 1) * math.log(math.pi) + loggamma(1 - t)
        with np.errstate(over="ignore", invalid="ignore"):
            out[refl] = np.exp(logf) * sinpi(t / 2) * _zeta_em(1 - t)
    out = out.reshape(s.shape)
    return out if out.ndim else complex(out[()])


def zeta_shifted(s, h):
    """zeta(s**2 + h); even in ``s`` by construction."""
    s = np.asarray(s, dtype=complex)
    w = s * s + h
    if np.any(np.abs(w - 1) < SHIFT_POLE_TOL):
        bad = s.ravel()[np.argmin(np.abs(w - 1).ravel())]
        raise PoleError("zeta(s^2 + h) has a pole here", at=complex(bad), h=h)
    return zeta(w)


def cauchy_derivative(f, z0, radius=1e-2, n=32):
    """f'(z0) from the trapezoid rule on a small circle (spectrally accurate)."""
    th = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * th)
    vals = np.asarray(f(z0 + radius * e), dtype=complex)
    return complex(np.mean(vals / e) / radius)


# --- domains ----------------------------------------------------------------

def _ray_distance(p, origin, direction):
    d = p - origin
    t = (d * np.conj(direction)).real
    return np.where(t < 0, np.abs(d), np.abs((d * np.conj(direction)).imag))


@dataclass(frozen=True)
class DomainDescriptor:
    """An open region of C described by what it excludes.

    ``rays`` are (origin, unit direction) pairs and ``points`` isolated
    excluded points; ``half-plane`` and ``ball`` kinds use ``params``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    rays: tuple = ()
    points: tuple = ()
    predicate: Optional[Callable] = None

    @property
    def simply_connected(self):
        return self.kind != "plane-minus-point"

    def clearance(self, p):
        """Distance from ``p`` to the excluded set (inf for the whole plane)."""
        p = np.asarray(p, dtype=complex)
        dist = np.full(p.shape, np.inf)
        for o, d in self.rays:
            dist = np.minimum(dist, _ray_distance(p, o, d))
        for q in self.points:
            dist = np.minimum(dist, np.abs(p - q))
        if self.kind == "half-plane":
            dist = np.minimum(dist, np.maximum(p.real - self.params["re_min"], 0.0))
        elif self.kind == "ball":
            c, r = self.params["center"], self.params["radius"]
            dist = np.minimum(dist, np.maximum(r - np.abs(p - c), 0.0))
        return dist

    def contains(self, p, tol=1e-12):
        p = np.asarray(p, dtype=complex)
        inside = self.clearance(p) > tol * np.maximum(1.0, np.abs(p))
        if self.predicate is not None:
            inside &= np.asarray(self.predicate(p), dtype=bool)
        return inside if inside.ndim else bool(inside)

    def admits(self, path: contours.Contour, samples=128):
        """True when the sampled path stays in the domain and crosses no ray."""
        z = path.sample(samples)
        if not np.all(self.contains(z)):
            return False
        for o, d in self.rays:
            w = (z - o) * np.conj(d)  # ray becomes the positive real axis
            a, b = w[:-1], w[1:]
            flip = (np.sign(a.imag) != np.sign(b.imag)) & (a.imag != b.imag)
            x = a.real - a.imag * (b.real - a.real) / np.where(flip, b.imag - a.imag, 1.0)
            if np.any(flip & (x >= 0)):
                return False
        return True

    def to_json(self):
        out = {"kind": self.kind}
        out.update({k: (v if not isinstance(v, complex) else [v.real, v.imag])
                    for k, v in self.params.items()})
        return out


PLANE = DomainDescriptor("plane")


def omega_for_h(h: float) -> DomainDescriptor:
    """Holomorphy domain of zeta(s**2 + h): C minus the rays through its poles."""
    h = float(h)
    if h > 1:
        c = math.sqrt(h - 1)
        rays = ((complex(0, c), 1 + 0j), (complex(0, -c), 1 + 0j))
    elif h < 1:
        c = math.sqrt(1 - h)
        rays = ((complex(c, 0), 1j), (complex(-c, 0), 1j))
    else:
        rays = ((0j, 1 + 0j),)
    return DomainDescriptor("plane-minus-rays", {"h": h}, rays)


def half_plane(re_min: float) -> DomainDescriptor:
    return DomainDescriptor("half-plane", {"re_min": float(re_min)})


def ball(center, radius) -> DomainDescriptor:
    return DomainDescriptor("ball", {"center": complex(center), "radius": float(radius)})


def plane_minus_point(p) -> DomainDescriptor:
    return DomainDescriptor("plane-minus-point", {"point": complex(p)}, points=(complex(p),))


# --- symbols ----------------------------------------------------------------

@dataclass(frozen=True)
class SymbolSpec:
    evaluate: Callable
    omega: DomainDescriptor
    poles: tuple = ()
    label: str = ""
    taylor_center: complex = 0j
    taylor_coeffs: Optional[tuple] = None
    params: dict = field(default_factory=dict)

    def __call__(self, s):
        return self.evaluate(s)

    def check_invariants(self, probes=16, seed=0):
        for p in self.poles:
            if self.omega.contains(p):
                raise ValueError(f"pole {p} lies inside the domain")
        rng = np.random.default_rng(seed)
        z = rng.uniform(-3, 3, probes) + 1j * rng.uniform(-3, 3, probes)
        z = z[self.omega.contains(z)]
        if z.size and not np.all(np.isfinite(self.evaluate(z))):
            raise ValueError("symbol is not finite at interior probes")
        return True


def shifted_zeta_symbol(h: float) -> SymbolSpec:
    h = float(h)
    if h > 1:
        poles = (complex(0, math.sqrt(h - 1)), complex(0, -math.sqrt(h - 1)))
    elif h < 1:
        poles = (complex(math.sqrt(1 - h)), complex(-math.sqrt(1 - h)))
    else:
        poles = (0j,)
    return SymbolSpec(lambda s: zeta_shifted(s, h), omega_for_h(h), poles,
                      f"zeta-shifted:h={h:g}", params={"family": "zeta-shifted", "h": h})


def poly_symbol(coeffs: Sequence[complex]) -> SymbolSpec:
    """Polynomial with ascending coefficients c0 + c1 s + c2 s^2 + ..."""
    c = tuple(complex(x) for x in coeffs)
    desc = c[::-1]
    return SymbolSpec(lambda s: np.polyval(desc, np.asarray(s, dtype=complex)), PLANE,
                      (), "poly:" + ",".join(_fmt(x) for x in c), 0j, c,
                      {"family": "poly", "coeffs": c})


def exp_symbol() -> SymbolSpec:
    return SymbolSpec(lambda s: np.exp(np.asarray(s, dtype=complex)), PLANE, (), "exp",
                      params={"family": "exp"})


def zeta_symbol() -> SymbolSpec:
    return SymbolSpec(zeta, plane_minus_point(1.0), (1 + 0j,), "zeta",
                      params={"family": "zeta"})


def dirichlet_l_symbol(chi: Sequence[complex]) -> SymbolSpec:
    chi = tuple(complex(x) for x in chi)
    return SymbolSpec(lambda s: dirichlet_l(s, chi), half_plane(1.0), (),
                      f"dirichlet-l:mod={len(chi)},chi=" + ",".join(_fmt(x) for x in chi),
                      params={"family": "dirichlet-l", "chi": chi})


def ap_dirichlet_symbol(alpha: float) -> SymbolSpec:
    gen = almost_periodic(alpha)
    return SymbolSpec(lambda s: np.vectorize(lambda x: dirichlet_series(x, gen), otypes=[complex])(s),
                      half_plane(1.0), (), f"ap-dirichlet:alpha={alpha!r}",
                      params={"family": "ap-dirichlet", "alpha": alpha})


def _fmt(x: complex):
    if x.imag == 0:
        return f"{x.real:g}"
    return f"{x.real:g}{x.imag:+g}i"


def parse_complex(text: str) -> complex:
    """Parse '1.5', '2i', '-1+0.5i', '3-2j'."""
    t = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    t = t.replace("+j", "+1j").replace("-j", "-1j")
    return complex(t)


def parse_symbol(text: str) -> SymbolSpec:
    """Symbols by name: 'zeta-shifted:h=2', 'dirichlet-l:mod=4,chi=1,0,-1,0',
    'poly:c0,c1,...' (ascending powers), 'exp', 'zeta', 'ap-dirichlet:alpha=0.61'."""
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    if name == "exp":
        return exp_symbol()
    if name == "zeta":
        return zeta_symbol()
    if name == "poly":
        return poly_symbol([parse_complex(x) for x in arg.split(",") if x])
    if name == "zeta-shifted":
        kv = dict(p.split("=") for p in arg.split(",") if p)
        return shifted_zeta_symbol(float(kv["h"]))
    if name == "dirichlet-l":
        head, _, chi = arg.partition("chi=")
        mod = dict(p.split("=") for p in head.split(",") if p).get("mod")
        table = [parse_complex(x) for x in chi.split(",") if x]
        if mod is not None and int(mod) != len(table):
            raise ValueError(f"character table has {len(table)} entries, expected {mod}")
        return dirichlet_l_symbol(table)
    if name == "ap-dirichlet":
        kv = dict(p.split("=") for p in arg.split(",") if p)
        alpha = kv.get("alpha", "golden")
        return ap_dirichlet_symbol((1 + math.sqrt(5)) / 2 if alpha == "golden" else float(alpha))
    raise ValueError(f"unknown symbol {text!r}")


# --- Taylor coefficients ------------------------------------------------------

def taylor_zeta_shifted(h: float, K: int, rho: float, cfg=contours.DEFAULT_QUAD):
    """Taylor coefficients a_0..a_K of zeta(s**2 + h) at 0 from Cauchy integrals
    on |s| = rho.  Odd coefficients vanish by symmetry and are set to 0."""
    if h <= 1:
        raise RadiusTooLarge("no pole-free disc at the origin for h <= 1", h=h)
    if K > 64 or K < 0:
        raise ValueError("K must lie in [0, 64]")
    if not (0 < rho < math.sqrt(h - 1)):
        raise RadiusTooLarge("radius must be below sqrt(h - 1)", rho=rho, limit=math.sqrt(h - 1))
    path = contours.circle(0, rho)
    k = np.arange(K + 1)[:, None]
    res = contours.integrate(lambda s: zeta_shifted(s, h)[None, :] / s[None, :] ** (k + 1), path, cfg)
    a = np.asarray(res.value) / contours.TWO_PI_I
    a[1::2] = 0
    return a.real.astype(float) if np.all(np.abs(a.imag) <= 1e-13 * np.max(np.abs(a))) else a


def taylor_zeta_shifted_radius(h: float) -> float:
    """Radius of convergence of the Taylor series at 0 (distance to the poles)."""
    return math.sqrt(h - 1) if h > 1 else 0.0


# --- Dirichlet series -------------------------------------------------------

def dirichlet_l(s, chi: Sequence[complex]):
    """L(s, chi) = sum chi(n) n**-s for Re(s) > 1, chi(n) = chi[(n - 1) % m].

    Each residue class is summed with Euler-Maclaurin, so the result is
    accurate to about 1e-13 rather than limited by a truncated tail.
    """
    s_arr = np.asarray(s, dtype=complex)
    flat = s_arr.ravel()
    if np.any(flat.real <= 1):
        raise OutsideDomain("Dirichlet series are only summed for Re(s) > 1",
                            s=complex(flat[np.argmin(flat.real)]))
    chi = [complex(x) for x in chi]
    m = len(chi)
    out = np.zeros(flat.shape, dtype=complex)
    n = max(20, int(math.ceil(np.max(np.abs(flat.imag)))) + 20)
    for a, c in enumerate(chi, start=1):
        if c != 0:
            out += c * _em_sum(flat, a / m, n)
    out *= np.exp(-flat * math.log(m))
    out = out.reshape(s_arr.shape)
    return out if out.ndim else complex(out[()])


def almost_periodic(alpha: float):
    """Coefficient generator n -> exp(2 pi i n alpha)."""
    return lambda n: np.exp(2j * np.pi * np.mod(n * alpha, 1.0))


def dirichlet_series(s, a: Callable, tol=1e-10, max_terms=1 << 22, full_output=False):
    """Truncated sum of a(n) n**-s for bounded coefficients and Re(s) > 1.

    ``a`` maps an integer array to coefficient values.  The truncation point
    comes from the tail bound sup|a| * N**(1 - sigma) / (sigma - 1), capped at
    ``max_terms``; the returned error is that bound.
    """
    s = complex(s)
    sigma = s.real
    if sigma <= 1:
        raise OutsideDomain("Dirichlet series are only summed for Re(s) > 1", s=s)
    probe = np.asarray(a(np.arange(1, 1025)), dtype=complex)
    bound = float(np.max(np.abs(probe))) if probe.size else 0.0
    if bound > 1e6:
        raise InvalidSequence("coefficients look unbounded", sup=bound)
    if bound == 0:
        return (0j, 0.0, 0) if full_output else 0j
    need = (bound / (tol * (sigma - 1))) ** (1 / (sigma - 1))
    n_terms = int(min(max_terms, max(1024, math.ceil(need))))
    total = 0j
    chunk = 1 << 16
    for start in range(1, n_terms + 1, chunk):
        n = np.arange(start, min(start + chunk, n_terms + 1))
        c = np.asarray(a(n), dtype=complex)
        if np.any(np.abs(c) > 1e6):
            raise InvalidSequence("coefficients look unbounded", at=int(n[np.argmax(np.abs(c))]))
        total += np.sum(c * np.exp(-s * np.log(n)))
    err = bound * n_terms ** (1 - sigma) / (sigma - 1)
    return (total, err, n_terms) if full_output else total
