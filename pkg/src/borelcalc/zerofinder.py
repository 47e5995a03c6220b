"""Zero location and certification: recursive argument-principle scans, a
persisted catalog of nontrivial zeta zeros, and the pullback of zeta zeros
to zeros of ``zeta(s**2 + h)``."""
from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import contours, symbols
from .errors import (CertificationFailure, DomainObstruction, IncompleteCatalog,
                     NoConvergence, ScanFailure, StaleCatalog, ZeroOnBoundary)

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
TIGHT_HALF_SIDE = 5e-4
_SPLITS = (0.4823, 0.5177, 0.4611, 0.5389, 0.4437, 0.5563)
CATALOG_VERSION = 1
EVALUATOR = {"zeta": "euler-maclaurin+reflection", "bernoulli_terms": 12,
             "lanczos_g": "671/128", "lanczos_terms": 15}


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    multiplicity: int
    residual: float
    method: str
    derivative_at_zero: Optional[complex] = None
    certified: bool = True

    def to_json(self):
        d = {"location": [self.location.real, self.location.imag],
             "multiplicity": self.multiplicity, "residual": self.residual,
             "method": self.method, "certified": self.certified}
        if self.derivative_at_zero is not None:
            d["derivative_at_zero"] = [self.derivative_at_zero.real, self.derivative_at_zero.imag]
        return d

    @classmethod
    def from_json(cls, d):
        der = d.get("derivative_at_zero")
        return cls(complex(*d["location"]), int(d["multiplicity"]), float(d["residual"]),
                   d["method"], None if der is None else complex(*der), bool(d.get("certified", True)))


def _evaluate(f):
    return f.evaluate if isinstance(f, symbols.SymbolSpec) else f


def _scalar(fn, s):
    return complex(np.asarray(fn(np.array([s], dtype=complex)))[0])


def newton(fn: Callable, s0: complex, multiplicity=1, tol=1e-14, max_iter=60, radius=math.inf):
    """Newton iteration (modified for multiplicity) with a central-difference
    derivative.  Returns the final iterate; raises NoConvergence on failure
    or when an iterate strays more than ``radius`` from ``s0``."""
    s = complex(s0)
    for _ in range(max_iter):
        if abs(s - s0) > radius:
            raise NoConvergence("Newton iterate left the trust region", best=s)
        step_h = 1e-6 * max(1.0, abs(s))
        pts = np.array([s, s + step_h, s - step_h])
        v = np.asarray(fn(pts), dtype=complex)
        if not np.all(np.isfinite(v)):
            raise NoConvergence("Newton iterate hit a non-finite value", best=s)
        if v[0] == 0:
            return s
        d = (v[1] - v[2]) / (2 * step_h)
        if d == 0:
            raise NoConvergence("vanishing derivative in Newton step", best=s)
        step = multiplicity * v[0] / d
        s -= step
        if abs(step) <= tol * max(1.0, abs(s)):
            return s
    raise NoConvergence("Newton iteration did not converge", best=s)


def _box_count(fn, lo, hi):
    return contours.count_zeros(fn, contours.rectangle(lo, hi))


def _tight_count(fn, s, half=TIGHT_HALF_SIDE):
    """Count zeros in a small square about ``s``, shrinking on boundary hits."""
    for k in range(5):
        hs = half * (0.73 ** k)
        try:
            return _box_count(fn, s - hs * (1 + 1j), s + hs * (1 + 1j)), hs
        except ZeroOnBoundary:
            continue
    raise ScanFailure("zero on the certification box boundary after 5 shrinks", at=s)


def scan_zeros(f, box: contours.Contour, max_depth: int = 24) -> List[ZeroRecord]:
    """Zeros of ``f`` inside the rectangle ``box`` by recursive quadrisection.

    ``f`` is a SymbolSpec or a vectorized callable.  Listed poles must lie
    outside the box.
    """
    fn = _evaluate(f)
    pts = [s.start for s in box.segments]
    lo = complex(min(p.real for p in pts), min(p.imag for p in pts))
    hi = complex(max(p.real for p in pts), max(p.imag for p in pts))
    if isinstance(f, symbols.SymbolSpec):
        for p in f.poles:
            if lo.real <= p.real <= hi.real and lo.imag <= p.imag <= hi.imag:
                raise DomainObstruction("pole of the symbol inside the scan box", pole=p)

    records: List[ZeroRecord] = []
    n0 = None
    for k in range(6):
        grow = 1e-3 * k * (hi - lo)
        try:
            n0 = _box_count(fn, lo - grow, hi + grow)
            lo, hi = lo - grow, hi + grow
            break
        except ZeroOnBoundary:
            continue
    if n0 is None:
        raise ScanFailure("zero on the scan box boundary after 5 jitters", lo=lo, hi=hi)
    stack = [(lo, hi, n0, 0)]
    while stack:
        lo, hi, count, depth = stack.pop()
        if count == 0:
            continue
        rec = _try_isolate(fn, lo, hi, count)
        if rec is not None:
            records.append(rec)
            continue
        if depth >= max_depth or abs(hi - lo) < 1e-9:
            raise ScanFailure("could not isolate zeros within the depth limit",
                              lo=lo, hi=hi, count=count)
        stack.extend(_quadrisect(fn, lo, hi, count, depth))
    records.sort(key=lambda r: (round(r.location.imag, 9), round(r.location.real, 9)))
    return records


def _try_isolate(fn, lo, hi, count):
    """Newton from the centroid; accept when a tight box around the result
    holds all ``count`` zeros of the cell."""
    center = 0.5 * (lo + hi)
    try:
        s = newton(fn, center, multiplicity=count, radius=abs(hi - lo))
    except NoConvergence:
        return None
    if not (lo.real <= s.real <= hi.real and lo.imag <= s.imag <= hi.imag):
        return None
    res = abs(_scalar(fn, s))
    if res > RESIDUAL_TOL:
        return None
    m, _ = _tight_count(fn, s)
    if m != count:
        return None
    der = symbols.cauchy_derivative(fn, s, radius=1e-3 * max(1.0, abs(s)) * 0.1) if m == 1 else None
    return ZeroRecord(s, m, res, "scan", der, True)


def _quadrisect(fn, lo, hi, count, depth):
    for frac in _SPLITS:
        mid = complex(lo.real + frac * (hi.real - lo.real), lo.imag + frac * (hi.imag - lo.imag))
        cells = [(lo, mid), (complex(mid.real, lo.imag), complex(hi.real, mid.imag)),
                 (complex(lo.real, mid.imag), complex(mid.real, hi.imag)), (mid, hi)]
        try:
            counts = [_box_count(fn, a, b) for a, b in cells]
        except ZeroOnBoundary:
            continue
        if sum(counts) != count:
            continue
        return [(a, b, c, depth + 1) for (a, b), c in zip(cells, counts)]
    raise ScanFailure("zero on a cell boundary after 5 jitters", lo=lo, hi=hi)


# --- zeta catalog -----------------------------------------------------------

@dataclass
class ZetaZeroCatalog:
    """Nontrivial zeta zeros found by an upward scan of the strip 0 <= Re <= 1.

    ``height`` is the ordinate below which the catalog is complete.
    """

    zeros: List[complex]
    boxes: List[tuple]
    residuals: List[float]
    height: float
    path: Optional[str] = None
    evaluator: dict = field(default_factory=lambda: dict(EVALUATOR))

    @property
    def ordinates(self):
        return [z.imag for z in self.zeros]

    def to_json(self):
        return {"version": CATALOG_VERSION, "evaluator": self.evaluator, "height": self.height,
                "zeros": [{"ordinate": z.imag, "real": z.real,
                           "box": [b[0].real, b[0].imag, b[1].real, b[1].imag], "residual": r}
                          for z, b, r in zip(self.zeros, self.boxes, self.residuals)]}

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        self.path = str(path)

    @classmethod
    def load(cls, path, recertify=True):
        with open(path) as fh:
            data = json.load(fh)
        if data.get("version") != CATALOG_VERSION or data.get("evaluator") != EVALUATOR:
            raise StaleCatalog("catalog was built with different evaluator parameters",
                               path=str(path))
        zeros = [complex(e["real"], e["ordinate"]) for e in data["zeros"]]
        boxes = [(complex(e["box"][0], e["box"][1]), complex(e["box"][2], e["box"][3]))
                 for e in data["zeros"]]
        cat = cls(zeros, boxes, [float(e["residual"]) for e in data["zeros"]],
                  float(data["height"]), str(path))
        if recertify:
            cat.certify()
        return cat

    def certify(self):
        for z, (lo, hi) in zip(self.zeros, self.boxes):
            if _box_count(symbols.zeta, lo, hi) != 1:
                raise CertificationFailure("catalog box does not hold exactly one zero", zero=z)
            if abs(symbols.zeta(z)) > 1e-10:
                raise CertificationFailure("catalog zero has a large residual", zero=z)
        return True


def build_zeta_catalog(n: int, persist: Optional[str] = None, window: float = 10.0) -> ZetaZeroCatalog:
    """First ``n`` nontrivial zeros of zeta (``n <= 100``), each certified simple."""
    if not 1 <= n <= 100:
        raise ValueError("catalog size must lie in [1, 100]")
    found: List[ZeroRecord] = []
    y = 1.0
    while len(found) < n + 1:
        recs = scan_zeros(symbols.zeta, contours.rectangle(complex(0, y), complex(1, y + window)))
        found.extend(recs)
        y += window
        if len(found) >= n and len(found) > n:
            break
    found.sort(key=lambda r: r.location.imag)
    for r in found[:n]:
        if r.multiplicity != 1:
            raise CertificationFailure("catalog zero is not simple", zero=r.location)
    height = 0.5 * (found[n - 1].location.imag + found[n].location.imag) if len(found) > n else y
    keep = found[:n]
    boxes, zeros, residuals = [], [], []
    for r in keep:
        z = r.location
        m, hs = _tight_count(symbols.zeta, z)
        zeros.append(z)
        boxes.append((z - hs * (1 + 1j), z + hs * (1 + 1j)))
        residuals.append(abs(symbols.zeta(z)))
    cat = ZetaZeroCatalog(zeros, boxes, residuals, height)
    if persist:
        cat.save(persist)
    return cat


def load_or_build_catalog(path: Optional[str], n: int = 30) -> ZetaZeroCatalog:
    if path and os.path.exists(path):
        return ZetaZeroCatalog.load(path)
    return build_zeta_catalog(n, path)


# --- pullback to zeta(s^2 + h) ----------------------------------------------

def required_height(h: float, tau: float) -> float:
    """Ordinate up to which strip zeros w can satisfy |w - h| < tau**2."""
    d = max(0.0, h - 1.0, -h)
    return math.sqrt(max(tau ** 4 - d * d, 0.0))


def zeros_of_zeta_shifted(h: float, tau: float, catalog: Optional[ZetaZeroCatalog],
                          ) -> List[ZeroRecord]:
    """Zeros s of zeta(s**2 + h) with |s| < tau, from s = +-sqrt(w - h)."""
    if not tau > 0:
        raise ValueError("radius must be positive")
    need = required_height(h, tau)
    cands = []
    n = 1
    while 2 * n + h - tau * tau < 0 or abs(-2 * n - h) < tau * tau:
        if abs(-2 * n - h) < tau * tau:
            cands.append(complex(-2 * n))
        n += 1
    if need > 0:
        if catalog is None or catalog.height < need:
            raise IncompleteCatalog("zeta zero catalog does not reach the needed height",
                                    needed=need, height=None if catalog is None else catalog.height)
        for w in catalog.zeros:
            if w.imag <= need:
                cands += [w, w.conjugate()]

    fn = lambda s: symbols.zeta_shifted(s, h)
    out: List[ZeroRecord] = []
    for w in cands:
        root = np.sqrt(complex(w - h))
        branches = [root] if abs(root) < 1e-12 else [root, -root]
        for s0 in branches:
            if not abs(s0) < tau:
                continue
            out.append(_certify_pullback(fn, s0, w, h, multiplicity=2 if len(branches) == 1 else 1))
    out.sort(key=lambda r: (round(abs(r.location), 9), round(r.location.imag, 9),
                            round(r.location.real, 9)))
    return out


def _certify_pullback(fn, s0, w, h, multiplicity=1):
    s = s0
    if abs(w.imag) > 0:  # catalogued ordinates are numerical; polish in s
        try:
            s = newton(fn, s0, multiplicity, radius=1e-3 * max(1.0, abs(s0)))
        except NoConvergence as exc:
            raise CertificationFailure("Newton polish failed at a pullback zero", at=s0) from exc
    res = abs(_scalar(fn, s))
    scale = max(1.0, abs(s))
    m, _ = _tight_count(fn, s, half=min(TIGHT_HALF_SIDE * scale, 0.25 * max(abs(s), 1e-3)))
    if m != multiplicity:
        raise CertificationFailure("pullback zero failed the count check", at=s, count=m)
    if res > RESIDUAL_TOL:
        raise CertificationFailure("pullback zero has a large residual", at=s, residual=res)
    if abs((s * s + h) - w) > 1e-8 * max(1.0, abs(w)):
        raise CertificationFailure("polished zero drifted from its catalog entry", at=s)
    der = symbols.cauchy_derivative(fn, s, radius=min(1e-3, 0.25 * abs(s)) if abs(s) > 0 else 1e-3) \
        if multiplicity == 1 else None
    return ZeroRecord(s, multiplicity, res, "pullback", der, True)


def find_zeros(symbol: symbols.SymbolSpec, tau: float,
               catalog: Optional[ZetaZeroCatalog] = None) -> List[ZeroRecord]:
    """Zeros of ``symbol`` in the open disc |s| < tau."""
    if symbol.params.get("family") == "zeta-shifted":
        return zeros_of_zeta_shifted(symbol.params["h"], tau, catalog)
    if symbol.params.get("family") == "poly":
        c = np.trim_zeros(np.asarray(symbol.params["coeffs"], dtype=complex), "b")
        if c.size == 0:
            raise ValueError("the zero polynomial has no isolated zeros")
    box = contours.rectangle(complex(-tau, -tau), complex(tau, tau))
    if symbol.omega.kind != "plane" and not symbol.omega.admits(box):
        raise DomainObstruction("scan box leaves the symbol's domain", radius=tau)
    return [r for r in scan_zeros(symbol, box) if abs(r.location) < tau]
