"""Oriented piecewise line/arc paths, Gauss-Legendre quadrature and
argument-principle zero counting.

A :class:`Contour` is an immutable sequence of smooth segments, each
parametrized over ``[0, 1]``.  Quadrature is composite: every segment gets its
own rule, and :func:`integrate` doubles the per-segment node count until two
successive values agree.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (InvalidAngle, InvalidGeometry, NoConvergence,
                     SingularityOnPath, ZeroOnBoundary)

_JOIN_TOL = 1e-12
TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class Segment:
    """A smooth arc ``[0, 1] -> C``: either a straight line or a circular arc."""

    kind: str
    start: complex
    end: complex
    center: complex = 0j
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0

    def __post_init__(self):
        if self.kind == "line":
            if abs(self.end - self.start) == 0.0:
                raise InvalidGeometry("zero-length line segment", at=self.start)
        elif self.kind == "arc":
            if not self.radius > 0 or self.theta1 == self.theta0:
                raise InvalidGeometry("degenerate arc", center=self.center,
                                      radius=self.radius)
        else:
            raise InvalidGeometry(f"unknown segment kind {self.kind!r}")

    @classmethod
    def line(cls, a, b):
        return cls("line", complex(a), complex(b))

    @classmethod
    def arc(cls, center, radius, theta0, theta1):
        center = complex(center)
        radius = float(radius)
        return cls("arc", center + radius * np.exp(1j * theta0),
                   center + radius * np.exp(1j * theta1),
                   center, radius, float(theta0), float(theta1))

    def point(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "line":
            return self.start + (self.end - self.start) * u
        return self.center + self.radius * np.exp(1j * (self.theta0 + (self.theta1 - self.theta0) * u))

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "line":
            return np.full(u.shape, self.end - self.start, dtype=complex)
        sweep = self.theta1 - self.theta0
        return 1j * sweep * self.radius * np.exp(1j * (self.theta0 + sweep * u))

    @property
    def length(self):
        if self.kind == "line":
            return abs(self.end - self.start)
        return self.radius * abs(self.theta1 - self.theta0)

    def reversed(self):
        if self.kind == "line":
            return Segment.line(self.end, self.start)
        return Segment("arc", self.end, self.start, self.center, self.radius,
                       self.theta1, self.theta0)

    def to_json(self):
        out = {"kind": self.kind, "from": [self.start.real, self.start.imag],
               "to": [self.end.real, self.end.imag]}
        if self.kind == "arc":
            out.update(center=[self.center.real, self.center.imag],
                       radius=self.radius, theta0=self.theta0, theta1=self.theta1)
        return out

    @classmethod
    def from_json(cls, data):
        if data["kind"] == "line":
            return cls.line(complex(*data["from"]), complex(*data["to"]))
        return cls.arc(complex(*data["center"]), data["radius"],
                       data["theta0"], data["theta1"])


@dataclass(frozen=True)
class Contour:
    segments: tuple
    closed: bool = False
    label: str = ""

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise InvalidGeometry("contour needs at least one segment")
        for a, b in zip(segs, segs[1:]):
            if abs(a.end - b.start) > _JOIN_TOL * max(1.0, abs(a.end)):
                raise InvalidGeometry("segments do not join", gap=abs(a.end - b.start))
        if self.closed and abs(segs[-1].end - segs[0].start) > _JOIN_TOL * max(1.0, abs(segs[0].start)):
            raise InvalidGeometry("closed contour does not return to its start")

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    @property
    def length(self):
        return sum(s.length for s in self.segments)

    @property
    def orientation(self):
        """+1 for counter-clockwise closed contours, -1 for clockwise.

        Open contours report +1 (the direction of travel is the orientation).
        """
        if not self.closed:
            return 1
        z, w = self.nodes(16)
        area = 0.5 * np.sum((np.conj(z) * w).imag)
        return 1 if area > 0 else -1

    def nodes(self, n=32, rule="gauss-legendre"):
        """Quadrature points and complex weights: ``sum(f(z) * w) ~ int f ds``."""
        return _contour_nodes(self, int(n), rule)

    def sample(self, n_per_segment=64):
        u = np.linspace(0.0, 1.0, n_per_segment + 1)
        return np.concatenate([s.point(u[:-1]) for s in self.segments] + [np.array([self.end])])

    def reversed(self):
        return Contour(tuple(s.reversed() for s in reversed(self.segments)),
                       self.closed, self.label)

    def __add__(self, other):
        return Contour(self.segments + other.segments, False,
                       f"{self.label}+{other.label}")

    def to_json(self):
        return {"label": self.label, "closed": self.closed,
                "segments": [s.to_json() for s in self.segments]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(Segment.from_json(s) for s in data["segments"]),
                   bool(data["closed"]), data.get("label", ""))


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_per_segment: int = 32
    rule: str = "gauss-legendre"
    refine_until: float = 1e-10
    max_refinements: int = 6

    def __post_init__(self):
        if self.nodes_per_segment < 4:
            raise ValueError("nodes_per_segment must be >= 4")
        if not self.refine_until > 0:
            raise ValueError("refine_until must be positive")
        if self.rule not in ("gauss-legendre", "trapezoid"):
            raise ValueError(f"unknown rule {self.rule!r}")


DEFAULT_QUAD = QuadratureConfig()


class QuadResult(NamedTuple):
    value: complex
    error: float
    nodes: int


@functools.lru_cache(maxsize=64)
def _reference_rule(n, rule):
    if rule == "gauss-legendre":
        x, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * (x + 1.0), 0.5 * w
    u = np.linspace(0.0, 1.0, n)
    w = np.full(n, 1.0 / (n - 1))
    w[0] = w[-1] = 0.5 / (n - 1)
    return u, w


@functools.lru_cache(maxsize=256)
def _contour_nodes(contour, n, rule):
    u, wu = _reference_rule(n, rule)
    zs = [s.point(u) for s in contour.segments]
    ws = [wu * s.derivative(u) for s in contour.segments]
    z = np.concatenate(zs)
    w = np.concatenate(ws)
    z.flags.writeable = False
    w.flags.writeable = False
    return z, w


def _quad(density, path, n, rule):
    z, w = path.nodes(n, rule)
    vals = np.asarray(density(z))
    if not np.all(np.isfinite(vals)):
        bad = z[np.nonzero(~np.isfinite(vals))[-1][0]]
        raise SingularityOnPath("density is not finite on the path", at=complex(bad))
    return np.sum(vals * w, axis=-1), np.sum(np.abs(vals * w), axis=-1)


def integrate(density: Callable, path: Contour, cfg: QuadratureConfig = DEFAULT_QUAD) -> QuadResult:
    """Integrate ``density(s) ds`` along ``path`` (no ``1/(2 pi i)`` factor).

    ``density`` is called with an array of nodes and may return either an array
    of the same length or a stacked array whose last axis runs over the nodes;
    in the latter case ``value`` is an array too.
    """
    n = cfg.nodes_per_segment
    prev, _ = _quad(density, path, n, cfg.rule)
    err = np.inf
    for _ in range(cfg.max_refinements):
        n *= 2
        cur, absint = _quad(density, path, n, cfg.rule)
        diff = np.abs(cur - prev)
        floor = 64 * np.finfo(float).eps * absint
        err = float(np.max(diff))
        if np.all(diff <= cfg.refine_until * np.abs(cur) + floor):
            value = complex(cur) if np.ndim(cur) == 0 else cur
            return QuadResult(value, err, n * len(path.segments))
        prev = cur
    best = complex(prev) if np.ndim(prev) == 0 else prev
    raise NoConvergence("quadrature refinement budget exhausted", best=best, error=err)


# --- constructors -----------------------------------------------------------

def circle(center, radius, pieces=4, label=None) -> Contour:
    """Positively oriented circle made of ``pieces`` equal arcs."""
    if not radius > 0:
        raise InvalidGeometry("circle radius must be positive", radius=radius)
    step = 2 * math.pi / pieces
    segs = [Segment.arc(center, radius, k * step, (k + 1) * step) for k in range(pieces)]
    # close exactly: the last arc must end where the first one starts
    last = segs[-1]
    segs[-1] = Segment("arc", last.start, segs[0].start, last.center, last.radius,
                       last.theta0, last.theta1)
    return Contour(tuple(segs), True, label or f"circle({complex(center)}, {radius})")


def polygon(points: Sequence[complex], closed=True, label="polygon") -> Contour:
    pts = [complex(p) for p in points]
    if closed:
        pts = pts + [pts[0]]
    segs = tuple(Segment.line(a, b) for a, b in zip(pts, pts[1:]))
    return Contour(segs, closed, label)


def rectangle(lower_left, upper_right, label=None) -> Contour:
    a, b = complex(lower_left), complex(upper_right)
    if not (a.real < b.real and a.imag < b.imag):
        raise InvalidGeometry("degenerate box", lower_left=a, upper_right=b)
    pts = [a, complex(b.real, a.imag), b, complex(a.real, b.imag)]
    return polygon(pts, True, label or f"rectangle({a}, {b})")


def ray_breaks(delta, r, grade=1.5):
    """Panel breakpoints along a ray from ``delta`` to ``r``.

    Geometric grading from ``delta`` up to 1, then unit panels.  The points
    below ``r`` do not depend on ``r``, so contours truncated at different
    radii share their panels (nested quadrature).
    """
    pts = [float(delta)]
    if delta < 1.0:
        n = max(1, math.ceil(math.log(1.0 / delta) / math.log(grade)))
        q = (1.0 / delta) ** (1.0 / n)
        pts += [delta * q ** k for k in range(1, n)] + [1.0]
    k = math.floor(pts[-1]) + 1
    while k < r:
        pts.append(float(k))
        k += 1
    pts = [p for p in pts if p < r]
    pts.append(float(r))
    return pts


def _arc_pieces(center, radius, theta0, theta1, max_sweep=math.pi / 4):
    n = max(1, math.ceil(abs(theta1 - theta0) / max_sweep))
    th = np.linspace(theta0, theta1, n + 1)
    return [Segment.arc(center, radius, a, b) for a, b in zip(th, th[1:])]


def _chain(segs):
    """Snap consecutive endpoints together (removes cos/sin rounding gaps)."""
    out = [segs[0]]
    for s in segs[1:]:
        prev = out[-1]
        if s.kind == "line":
            s = Segment.line(prev.end, s.end)
        else:
            s = Segment("arc", prev.end, s.end, s.center, s.radius, s.theta0, s.theta1)
        out.append(s)
    return out


def angular_contour(vertex, psi, delta, r, label=None) -> Contour:
    """Truncated Hankel-type path: in along angle ``-psi``, around the vertex
    on a radius-``delta`` arc through angle 0, out along angle ``+psi``."""
    if not (math.pi / 2 < psi <= math.pi):
        raise InvalidAngle("half-angle must lie in (pi/2, pi]", psi=psi)
    if not (0 < delta < r):
        raise InvalidGeometry("need 0 < delta < r", delta=delta, r=r)
    v = complex(vertex)
    brk = ray_breaks(delta, r)
    down = np.exp(-1j * psi)
    up = np.exp(1j * psi)
    inbound = [Segment.line(v + b * down, v + a * down)
               for a, b in reversed(list(zip(brk, brk[1:])))]
    arc = _arc_pieces(v, delta, -psi, psi)
    outbound = [Segment.line(v + a * up, v + b * up) for a, b in zip(brk, brk[1:])]
    segs = _chain(inbound + arc + outbound)
    return Contour(tuple(segs), False,
                   label or f"kappa(psi={psi!r}, delta={delta!r}, r={r!r})")


def angular_stubs(vertex, psi, r1, r2):
    """The two ray pieces of an angular contour between radii ``r1 < r2``,
    oriented like the full contour: ``(inbound, outbound)``."""
    v = complex(vertex)
    brk = [b for b in ray_breaks(min(r1, 1.0) / 2, r2) if b > r1]
    brk = [float(r1)] + brk
    down = np.exp(-1j * psi)
    up = np.exp(1j * psi)
    inbound = [Segment.line(v + b * down, v + a * down)
               for a, b in reversed(list(zip(brk, brk[1:])))]
    outbound = [Segment.line(v + a * up, v + b * up) for a, b in zip(brk, brk[1:])]
    return (Contour(tuple(_chain(inbound)), False, f"stub-in({r1},{r2})"),
            Contour(tuple(_chain(outbound)), False, f"stub-out({r1},{r2})"))


def sector_with_disc(alpha, rho, radius, vertex=0j, grade=1.35, label=None) -> Contour:
    """Boundary of ``{|s| < rho} U {|s| < radius, |arg s| >= alpha}``, positively
    oriented.  Encloses every angular contour with half-angle in
    ``(alpha, pi]``, arc radius below ``rho`` and length below ``radius``."""
    if not (0 < alpha < math.pi):
        raise InvalidAngle("alpha must lie in (0, pi)", alpha=alpha)
    if not (0 < rho < radius):
        raise InvalidGeometry("need 0 < rho < radius", rho=rho, radius=radius)
    v = complex(vertex)
    pts = [rho]
    while pts[-1] * grade < radius:
        pts.append(pts[-1] * grade)
    pts.append(radius)
    up = np.exp(1j * alpha)
    down = np.exp(-1j * alpha)
    small = _arc_pieces(v, rho, -alpha, alpha)
    out_ray = [Segment.line(v + a * up, v + b * up) for a, b in zip(pts, pts[1:])]
    big = _arc_pieces(v, radius, alpha, 2 * math.pi - alpha, max_sweep=math.pi / 16)
    in_ray = [Segment.line(v + b * down, v + a * down)
              for a, b in reversed(list(zip(pts, pts[1:])))]
    segs = _chain(small + out_ray + big + in_ray)
    last = segs[-1]
    segs[-1] = Segment.line(last.start, segs[0].start)
    return Contour(tuple(segs), True,
                   label or f"sector-disc(alpha={alpha!r}, rho={rho!r}, R={radius!r})")


# --- argument principle -----------------------------------------------------

def count_zeros(f: Callable, box: Contour, samples_per_segment=64, threshold=1e-8,
                max_levels=48) -> int:
    """Winding number of ``f`` along the closed contour ``box``.

    For ``f`` analytic inside ``box`` this is the number of zeros counted with
    multiplicity.  The argument is accumulated between consecutive samples; any
    step whose phase jump exceeds pi/2 is bisected until it does not.
    """
    if not box.closed:
        raise InvalidGeometry("count_zeros needs a closed contour")
    u = np.linspace(0.0, 1.0, samples_per_segment + 1)
    seg_idx = np.repeat(np.arange(len(box.segments)), samples_per_segment)
    ua = np.tile(u[:-1], len(box.segments))
    ub = np.tile(u[1:], len(box.segments))
    pts = np.concatenate([s.point(u) for s in box.segments])
    vals = np.asarray(f(pts), dtype=complex)
    _check_values(vals, pts)
    vals = vals.reshape(len(box.segments), samples_per_segment + 1)
    scale = float(np.max(np.abs(vals)))
    if np.min(np.abs(vals)) < threshold * scale:
        k = np.argmin(np.abs(vals))
        raise ZeroOnBoundary("function nearly vanishes on the contour",
                             at=complex(pts.reshape(vals.shape).ravel()[k]))
    fa = vals[:, :-1].ravel()
    fb = vals[:, 1:].ravel()

    total = 0.0
    for _ in range(max_levels):
        d = np.angle(fb / fa)
        ok = np.abs(d) <= math.pi / 2
        total += float(np.sum(d[ok]))
        if np.all(ok):
            break
        seg_idx, ua, ub, fa, fb = seg_idx[~ok], ua[~ok], ub[~ok], fa[~ok], fb[~ok]
        um = 0.5 * (ua + ub)
        zm = np.empty(len(um), dtype=complex)
        for k in np.unique(seg_idx):
            sel = seg_idx == k
            zm[sel] = box.segments[k].point(um[sel])
        fm = np.asarray(f(zm), dtype=complex)
        _check_values(fm, zm)
        if np.min(np.abs(fm)) < threshold * scale:
            raise ZeroOnBoundary("function nearly vanishes on the contour",
                                 at=complex(zm[np.argmin(np.abs(fm))]))
        seg_idx = np.concatenate([seg_idx, seg_idx])
        ua, ub = np.concatenate([ua, um]), np.concatenate([um, ub])
        fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])
    else:
        total += float(np.sum(np.angle(fb / fa)))

    wind = total / (2 * math.pi)
    n = round(wind)
    if abs(wind - n) > 0.25:
        raise NoConvergence("winding number is not close to an integer", best=wind)
    return int(n)


def _check_values(vals, pts):
    if not np.all(np.isfinite(vals)):
        k = int(np.nonzero(~np.isfinite(vals))[0][0])
        raise SingularityOnPath("function is not finite on the contour", at=complex(pts[k]))


def winding_number(contour: Contour, point) -> int:
    """Winding number of ``contour`` around ``point``."""
    p = complex(point)
    return count_zeros(lambda s: s - p, contour, threshold=1e-14)


def min_distance(contour: Contour, point, samples=256):
    z = contour.sample(samples)
    return float(np.min(np.abs(z - complex(point))))
