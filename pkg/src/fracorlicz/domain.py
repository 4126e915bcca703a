"""Geometric domains: membership, boundary distance, inradius and line sections.

Points are passed as arrays of shape ``(n, N)`` (or ``(n,)`` in one
dimension, or a single point).  All shapes are immutable and their queries
are closed form; countable unions are truncated to explicit finite lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "Domain", "IntervalUnion", "Box", "Ball", "AnnulusUnion", "PuncturedSpace", "ComplementOfBox",
    "HalfSpaceAboveGraph", "StripUnion", "LatticeHoles", "LineSection", "DegenerateDirection",
    "DomainSpecError", "dist_boundary", "ball_condition", "line_section", "exterior_measure_lb",
    "ExteriorMeasure", "domain_from_spec", "parse_domain",
]

INF = math.inf
LATTICE_WINDOW = 50.0


class DegenerateDirection(ValueError):
    pass


class DomainSpecError(ValueError):
    pass


def _points(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if dim == 1:
        return x.reshape(-1, 1)
    return x.reshape(-1, dim)


def _merge(intervals) -> list[tuple[float, float]]:
    """Sort and merge overlapping open intervals; empty ones are dropped."""
    ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
    out: list[list[float]] = []
    for a, b in ivs:
        if out and a < out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


class Domain:
    """Base class; subclasses implement the closed-form queries."""

    dim: int = 1

    @property
    def bounded(self) -> bool:
        lo, hi = self.bounding_box()
        return bool(np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)))

    def contains(self, x) -> np.ndarray:
        return self.dist_boundary(x) > 0

    def dist_boundary(self, x) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def nearest_boundary_point(self, x) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} does not expose nearest points")

    def ball_condition(self) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def line_section(self, x, omega) -> "LineSection":  # pragma: no cover - abstract
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return np.full(self.dim, -INF), np.full(self.dim, INF)

    def diameter(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))

    def boundary_points_1d(self) -> list[float]:
        raise NotImplementedError

    def to_spec(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def scaled(self, t: float) -> "Domain":
        raise NotImplementedError(f"{type(self).__name__} cannot be dilated")


@dataclass(frozen=True)
class LineSection:
    """``{t : x + t omega in D}`` as a finite union of open intervals."""

    base: tuple[float, ...]
    direction: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (t > a) & (t < b)
        return out

    def lengths(self) -> list[float]:
        return [b - a for a, b in self.intervals]

    def as_domain(self) -> "IntervalUnion":
        return IntervalUnion(self.intervals)


# ---------------------------------------------------------------------------
# one dimension

@dataclass(frozen=True)
class IntervalUnion(Domain):
    """Finite union of pairwise disjoint open intervals of the real line."""

    intervals: tuple[tuple[float, float], ...]
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise DomainSpecError("IntervalUnion needs at least one interval")
        for a, b in ivs:
            if not a < b:
                raise DomainSpecError(f"interval ({a}, {b}) is empty")
        ivs = tuple(sorted(ivs))
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise DomainSpecError("intervals must be pairwise disjoint")
        object.__setattr__(self, "intervals", ivs)

    def dist_boundary(self, x):
        x = _points(x, 1)[:, 0]
        out = np.zeros_like(x)
        for a, b in self.intervals:
            inside = (x > a) & (x < b)
            out = np.where(inside, np.minimum(x - a, b - x), out)
        return out

    def nearest_boundary_point(self, x):
        x = _points(x, 1)[:, 0]
        out = np.full_like(x, np.nan)
        for a, b in self.intervals:
            inside = (x > a) & (x < b)
            out = np.where(inside, np.where(x - a <= b - x, a, b), out)
        return out[:, None]

    def ball_condition(self):
        return max(b - a for a, b in self.intervals) / 2.0

    def line_section(self, x, omega):
        w = float(np.ravel(omega)[0])
        if abs(abs(w) - 1.0) > 1e-12 or abs(float(np.ravel(x)[0])) > 1e-12:
            raise ValueError("in one dimension omega = +-1 and x = 0")
        ivs = self.intervals if w > 0 else tuple(sorted((-b, -a) for a, b in self.intervals))
        return LineSection((0.0,), (w,), ivs)

    def bounding_box(self):
        return np.array([self.intervals[0][0]]), np.array([self.intervals[-1][1]])

    def boundary_points_1d(self):
        return sorted({p for iv in self.intervals for p in iv if math.isfinite(p)})

    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def complement_pieces(self) -> list[tuple[float, float]]:
        """Closed pieces of the complement, as ``(lo, hi)`` with infinite ends allowed."""
        pieces = []
        prev = -INF
        for a, b in self.intervals:
            if a > prev or (a == prev and math.isfinite(a)):
                pieces.append((prev, a))
            prev = b
        pieces.append((prev, INF))
        return [(a, b) for a, b in pieces if not (a == b == INF or a == b == -INF)]

    def scaled(self, t):
        return IntervalUnion(tuple((t * a, t * b) for a, b in self.intervals))

    def to_spec(self):
        return {"shape": "interval_union", "dim": 1, "intervals": [list(iv) for iv in self.intervals]}


# ---------------------------------------------------------------------------
# N dimensions

@dataclass(frozen=True)
class Box(Domain):
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise DomainSpecError("Box needs lo and hi of equal positive length")
        if any(not a < b for a, b in zip(lo, hi)):
            raise DomainSpecError("Box needs lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    def dist_boundary(self, x):
        x = _points(x, self.dim)
        lo, hi = np.array(self.lo), np.array(self.hi)
        d = np.minimum(x - lo, hi - x).min(axis=1)
        return np.maximum(d, 0.0)

    def nearest_boundary_point(self, x):
        x = _points(x, self.dim).copy()
        lo, hi = np.array(self.lo), np.array(self.hi)
        gaps = np.concatenate([x - lo, hi - x], axis=1)
        k = np.argmin(gaps, axis=1)
        rows = np.arange(len(x))
        axis = k % self.dim
        target = np.where(k < self.dim, lo[axis], hi[axis])
        x[rows, axis] = target
        return x

    def ball_condition(self):
        return min(b - a for a, b in zip(self.lo, self.hi)) / 2.0

    def line_section(self, x, omega):
        x, omega = _check_line(x, omega, self.dim)
        t0, t1 = -INF, INF
        for xi, wi, a, b in zip(x, omega, self.lo, self.hi):
            if abs(wi) < 1e-15:
                if not a < xi < b:
                    return LineSection(tuple(x), tuple(omega), ())
                continue
            u, v = (a - xi) / wi, (b - xi) / wi
            t0, t1 = max(t0, min(u, v)), min(t1, max(u, v))
        ivs = ((t0, t1),) if t1 > t0 else ()
        return LineSection(tuple(x), tuple(omega), ivs)

    def bounding_box(self):
        return np.array(self.lo), np.array(self.hi)

    def boundary_points_1d(self):
        return [self.lo[0], self.hi[0]]

    def measure(self):
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def scaled(self, t):
        return Box(tuple(t * a for a in self.lo), tuple(t * b for b in self.hi))

    def to_spec(self):
        return {"shape": "box", "dim": self.dim, "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Ball(Domain):
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.ravel(self.center)))
        if not self.radius > 0:
            raise DomainSpecError("Ball radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    def dist_boundary(self, x):
        x = _points(x, self.dim)
        return np.maximum(self.radius - np.linalg.norm(x - np.array(self.center), axis=1), 0.0)

    def nearest_boundary_point(self, x):
        x = _points(x, self.dim)
        c = np.array(self.center)
        v = x - c
        n = np.linalg.norm(v, axis=1, keepdims=True)
        unit = np.where(n > 0, v / np.where(n > 0, n, 1.0), np.eye(self.dim)[:1])
        return c + self.radius * unit

    def ball_condition(self):
        return float(self.radius)

    def line_section(self, x, omega):
        x, omega = _check_line(x, omega, self.dim)
        ivs = _chord(x - np.array(self.center), omega, self.radius)
        return LineSection(tuple(x), tuple(omega), tuple(ivs))

    def bounding_box(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def boundary_points_1d(self):
        return [self.center[0] - self.radius, self.center[0] + self.radius]

    def as_interval(self) -> IntervalUnion:
        if self.dim != 1:
            raise ValueError("only one-dimensional balls are intervals")
        return IntervalUnion(((self.center[0] - self.radius, self.center[0] + self.radius),))

    def scaled(self, t):
        return Ball(tuple(t * c for c in self.center), t * self.radius)

    def to_spec(self):
        return {"shape": "ball", "dim": self.dim, "center": list(self.center), "radius": self.radius}


def _chord(x_rel, omega, r) -> list[tuple[float, float]]:
    """Open parameter interval where ``|x_rel + t omega| < r``."""
    b = float(np.dot(x_rel, omega))
    c = float(np.dot(x_rel, x_rel)) - r * r
    disc = b * b - c
    if disc <= 0:
        return []
    sq = math.sqrt(disc)
    return [(-b - sq, -b + sq)]


def _check_line(x, omega, dim):
    x = np.asarray(x, dtype=float).ravel()
    omega = np.asarray(omega, dtype=float).ravel()
    if x.size != dim or omega.size != dim:
        raise ValueError(f"line needs {dim}-dimensional base and direction")
    if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    if abs(np.dot(x, omega)) > 1e-12 * max(1.0, np.linalg.norm(x)):
        raise ValueError("base point must lie in the orthogonal complement of omega")
    return x, omega


@dataclass(frozen=True)
class AnnulusUnion(Domain):
    """Union of concentric open annuli ``r_in < |x - c| < r_out`` (``r_in = 0`` gives a disc)."""

    center: tuple[float, ...]
    radii: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.ravel(self.center)))
        rr = tuple(sorted((float(a), float(b)) for a, b in self.radii))
        if not rr:
            raise DomainSpecError("AnnulusUnion needs at least one annulus")
        for (a, b) in rr:
            if not 0 <= a < b:
                raise DomainSpecError("annulus radii need 0 <= r_in < r_out")
        for (a0, b0), (a1, b1) in zip(rr, rr[1:]):
            if a1 < b0:
                raise DomainSpecError("annuli must be disjoint")
        object.__setattr__(self, "radii", rr)

    @property
    def dim(self):
        return len(self.center)

    def dist_boundary(self, x):
        x = _points(x, self.dim)
        rho = np.linalg.norm(x - np.array(self.center), axis=1)
        out = np.zeros_like(rho)
        for a, b in self.radii:
            inside = (rho < b) & ((rho > a) | (a == 0))
            d = b - rho if a == 0 else np.minimum(rho - a, b - rho)
            out = np.where(inside, d, out)
        return out

    def ball_condition(self):
        return max(b if a == 0 else (b - a) / 2.0 for a, b in self.radii)

    def line_section(self, x, omega):
        x, omega = _check_line(x, omega, self.dim)
        rel = x - np.array(self.center)
        ivs = []
        for a, b in self.radii:
            outer = _chord(rel, omega, b)
            if not outer:
                continue
            (o0, o1), = outer
            inner = _chord(rel, omega, a) if a > 0 else []
            if inner:
                (i0, i1), = inner
                ivs += [(o0, i0), (i1, o1)]
            else:
                ivs.append((o0, o1))
        return LineSection(tuple(x), tuple(omega), tuple(_merge(ivs)))

    def bounding_box(self):
        c = np.array(self.center)
        r = self.radii[-1][1]
        return c - r, c + r

    def scaled(self, t):
        return AnnulusUnion(tuple(t * c for c in self.center), tuple((t * a, t * b) for a, b in self.radii))

    def to_spec(self):
        return {"shape": "annulus_union", "dim": self.dim, "center": list(self.center),
                "radii": [list(r) for r in self.radii]}


@dataclass(frozen=True)
class PuncturedSpace(Domain):
    point: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(float(c) for c in np.ravel(self.point)))

    @property
    def dim(self):
        return len(self.point)

    def dist_boundary(self, x):
        x = _points(x, self.dim)
        return np.linalg.norm(x - np.array(self.point), axis=1)

    def nearest_boundary_point(self, x):
        x = _points(x, self.dim)
        return np.broadcast_to(np.array(self.point), x.shape).copy()

    def ball_condition(self):
        return INF

    def line_section(self, x, omega):
        x, omega = _check_line(x, omega, self.dim)
        rel = np.array(self.point) - x
        t0 = float(np.dot(rel, omega))
        if np.linalg.norm(rel - t0 * omega) < 1e-14:
            return LineSection(tuple(x), tuple(omega), ((-INF, t0), (t0, INF)))
        return LineSection(tuple(x), tuple(omega), ((-INF, INF),))

    def to_spec(self):
        return {"shape": "punctured_space", "dim": self.dim, "point": list(self.point)}


@dataclass(frozen=True)
class ComplementOfBox(Domain):
    """``R^N`` minus a closed box."""

    box: Box

    @property
    def dim(self):
        return self.box.dim

    def dist_boundary(self, x):
        x = _points(x, self.dim)
        lo, hi = np.array(self.box.lo), np.array(self.box.hi)
        gap = np.maximum(np.maximum(lo - x, x - hi), 0.0)
        return np.linalg.norm(gap, axis=1)

    def ball_condition(self):
        return INF

    def line_section(self, x, omega):
        sec = self.box.line_section(x, omega)
        if not sec.intervals:
            return LineSection(sec.base, sec.direction, ((-INF, INF),))
        (a, b), = sec.intervals
        return LineSection(sec.base, sec.direction, ((-INF, a), (b, INF)))

    def to_spec(self):
        return {"shape": "complement_of_box", "dim": self.dim, "lo": list(self.box.lo), "hi": list(self.box.hi)}


@dataclass(frozen=True)
class HalfSpaceAboveGraph(Domain):
    """``{(x1, x2) : x2 > Phi(x1)}`` for a piecewise-linear ``Phi`` on the plane.

    ``Phi`` interpolates ``knots`` linearly and continues with the given end
    slopes outside them.
    """

    knots: tuple[tuple[float, float], ...]
    left_slope: float = 0.0
    right_slope: float = 0.0
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        kn = tuple(sorted((float(a), float(b)) for a, b in self.knots))
        if not kn:
            raise DomainSpecError("graph needs at least one knot")
        if any(b[0] <= a[0] for a, b in zip(kn, kn[1:])):
            raise DomainSpecError("graph knots must have distinct abscissae")
        object.__setattr__(self, "knots", kn)

    def phi(self, x1):
        x1 = np.asarray(x1, dtype=float)
        kx = np.array([k[0] for k in self.knots])
        ky = np.array([k[1] for k in self.knots])
        y = np.interp(x1, kx, ky)
        y = np.where(x1 < kx[0], ky[0] + self.left_slope * (x1 - kx[0]), y)
        return np.where(x1 > kx[-1], ky[-1] + self.right_slope * (x1 - kx[-1]), y)

    def _segments(self):
        """Graph pieces as (point, unit direction, t_min, t_max)."""
        k = [np.array(p) for p in self.knots]
        segs = []
        dl = np.array([1.0, self.left_slope])
        dl /= np.linalg.norm(dl)
        segs.append((k[0], -dl, 0.0, INF))
        for a, b in zip(k, k[1:]):
            d = b - a
            n = np.linalg.norm(d)
            segs.append((a, d / n, 0.0, n))
        dr = np.array([1.0, self.right_slope])
        dr /= np.linalg.norm(dr)
        segs.append((k[-1], dr, 0.0, INF))
        return segs

    def dist_boundary(self, x):
        x = _points(x, 2)
        best = np.full(len(x), INF)
        for p, d, t0, t1 in self._segments():
            t = np.clip((x - p) @ d, t0, t1)
            best = np.minimum(best, np.linalg.norm(x - (p + t[:, None] * d), axis=1))
        return np.where(x[:, 1] > self.phi(x[:, 0]), best, 0.0)

    def ball_condition(self):
        return INF

    def line_section(self, x, omega):
        x, omega = _check_line(x, omega, 2)
        if abs(omega[0]) < 1e-15:
            # vertical line: x2 = x[1] + t omega[1] > Phi(x[0])
            level = (float(self.phi(x[0])) - x[1]) / omega[1]
            ivs = ((level, INF),) if omega[1] > 0 else ((-INF, level),)
            return LineSection(tuple(x), tuple(omega), ivs)
        # g(t) = x2(t) - Phi(x1(t)) is piecewise linear in t with kinks at the knot abscissae
        kinks = sorted((k[0] - x[0]) / omega[0] for k in self.knots)

        def g(t):
            return x[1] + t * omega[1] - float(self.phi(x[0] + t * omega[0]))

        gk = [g(t) for t in kinks]
        roots = []
        for ta, tb, ga, gb in zip(kinks, kinks[1:], gk, gk[1:]):
            if ga * gb < 0:
                roots.append(ta - ga * (tb - ta) / (gb - ga))
        roots += [t for t, v in zip(kinks, gk) if v == 0.0]
        sl = gk[0] - g(kinks[0] - 1.0)
        sr = g(kinks[-1] + 1.0) - gk[-1]
        if sl != 0 and kinks[0] - gk[0] / sl < kinks[0]:
            roots.append(kinks[0] - gk[0] / sl)
        if sr != 0 and kinks[-1] - gk[-1] / sr > kinks[-1]:
            roots.append(kinks[-1] - gk[-1] / sr)
        edges = [-INF] + sorted(set(roots)) + [INF]
        ivs = []
        for a, b in zip(edges, edges[1:]):
            if a == -INF:
                mid = (b - 1.0) if b != INF else 0.0
            elif b == INF:
                mid = a + 1.0
            else:
                mid = 0.5 * (a + b)
            if b > a and g(mid) > 0:
                ivs.append((a, b))
        return LineSection(tuple(x), tuple(omega), tuple(ivs))

    def to_spec(self):
        return {"shape": "half_space_above_graph", "dim": 2, "knots": [list(k) for k in self.knots],
                "left_slope": self.left_slope, "right_slope": self.right_slope}


@dataclass(frozen=True)
class StripUnion(Domain):
    """``I x R`` in the plane, ``I`` a finite union of open intervals."""

    cross: IntervalUnion
    dim: int = field(default=2, init=False)

    def dist_boundary(self, x):
        x = _points(x, 2)
        return self.cross.dist_boundary(x[:, 0])

    def ball_condition(self):
        return self.cross.ball_condition()

    def min_gap(self) -> float:
        ivs = self.cross.intervals
        return min((b[0] - a[1] for a, b in zip(ivs, ivs[1:])), default=INF)

    def line_section(self, x, omega):
        x, omega = _check_line(x, omega, 2)
        c = omega[0]
        if abs(c) < 1e-15:
            inside = bool(self.cross.dist_boundary(x[0])[0] > 0)
            return LineSection(tuple(x), tuple(omega), ((-INF, INF),) if inside else ())
        ivs = [((a - x[0]) / c, (b - x[0]) / c) for a, b in self.cross.intervals]
        ivs = [(min(u, v), max(u, v)) for u, v in ivs]
        return LineSection(tuple(x), tuple(omega), tuple(sorted(ivs)))

    def to_spec(self):
        return {"shape": "strip_union", "dim": 2, "intervals": [list(iv) for iv in self.cross.intervals]}


@dataclass(frozen=True)
class LatticeHoles(Domain):
    """The plane minus closed discs of radius ``hole_radius`` around ``Z^2``."""

    hole_radius: float = 0.1
    window: float = LATTICE_WINDOW
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not 0 < self.hole_radius < 0.5:
            raise DomainSpecError("hole radius must lie in (0, 1/2)")

    def dist_boundary(self, x):
        x = _points(x, 2)
        near = x - np.round(x)
        return np.maximum(np.linalg.norm(near, axis=1) - self.hole_radius, 0.0)

    def ball_condition(self):
        return math.sqrt(0.5) - self.hole_radius

    def line_section(self, x, omega):
        """Section truncated to ``|t| <= window``; the full section is periodic-like and unbounded."""
        x, omega = _check_line(x, omega, 2)
        W = self.window
        cuts = []
        lo = np.floor(np.minimum(x - W * np.abs(omega), x + W * np.abs(omega))) - 1
        hi = np.ceil(np.maximum(x - W * np.abs(omega), x + W * np.abs(omega))) + 1
        # lattice points within hole_radius of the segment
        gi = np.arange(lo[0], hi[0] + 1)
        gj = np.arange(lo[1], hi[1] + 1)
        P = np.stack(np.meshgrid(gi, gj, indexing="ij"), axis=-1).reshape(-1, 2)
        rel = x - P
        b = rel @ omega
        c = np.einsum("ij,ij->i", rel, rel) - self.hole_radius ** 2
        disc = b * b - c
        hit = disc > 0
        sq = np.sqrt(disc[hit])
        for t0, t1 in zip(-b[hit] - sq, -b[hit] + sq):
            if t1 > -W and t0 < W:
                cuts.append((t0, t1))
        cuts.sort()
        ivs, cur = [], -W
        for t0, t1 in cuts:
            if t0 > cur:
                ivs.append((cur, t0))
            cur = max(cur, t1)
        if cur < W:
            ivs.append((cur, W))
        return LineSection(tuple(x), tuple(omega), tuple(ivs))

    def to_spec(self):
        return {"shape": "lattice_holes", "dim": 2, "hole_radius": self.hole_radius}


# ---------------------------------------------------------------------------
# functional API

def dist_boundary(D: Domain, x):
    return D.dist_boundary(x)


def ball_condition(D: Domain) -> float:
    return D.ball_condition()


def line_section(D: Domain, x, omega) -> LineSection:
    return D.line_section(x, omega)


@dataclass(frozen=True)
class ExteriorMeasure:
    """min over sampled ``x in D`` of ``|B(x, R) \\ D|`` with the sampling error at the minimiser."""

    value: float
    std_error: float
    argmin: tuple[float, ...]
    n_samples: int


def _exterior_1d(D: IntervalUnion, x, R):
    lo, hi = x - R, x + R
    inside = np.zeros_like(x)
    for a, b in D.intervals:
        inside += np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)
    return 2 * R - inside


def _lens_area(d, r1, r2):
    """Area of the intersection of two discs with centres ``d`` apart."""
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    full = d <= abs(r1 - r2)
    out[full] = math.pi * min(r1, r2) ** 2
    part = (~full) & (d < r1 + r2)
    dp = d[part]
    a1 = r1 * r1 * np.arccos(np.clip((dp * dp + r1 * r1 - r2 * r2) / (2 * dp * r1), -1, 1))
    a2 = r2 * r2 * np.arccos(np.clip((dp * dp + r2 * r2 - r1 * r1) / (2 * dp * r2), -1, 1))
    a3 = 0.5 * np.sqrt(np.clip((-dp + r1 + r2) * (dp + r1 - r2) * (dp - r1 + r2) * (dp + r1 + r2), 0, None))
    out[part] = a1 + a2 - a3
    return out


def _sample_points(D: Domain, n: int, rng) -> np.ndarray:
    if isinstance(D, LatticeHoles):
        box_lo, box_hi = np.array([-0.5, -0.5]), np.array([0.5, 0.5])
    elif isinstance(D, PuncturedSpace):
        c = np.array(D.point)
        box_lo, box_hi = c - 4.0, c + 4.0
    else:
        box_lo, box_hi = D.bounding_box()
        box_lo = np.where(np.isfinite(box_lo), box_lo, -LATTICE_WINDOW)
        box_hi = np.where(np.isfinite(box_hi), box_hi, LATTICE_WINDOW)
    pts = []
    have = 0
    for _ in range(200):
        cand = rng.uniform(box_lo, box_hi, size=(max(2 * n, 64), D.dim))
        cand = cand[D.contains(cand)]
        pts.append(cand)
        have += len(cand)
        if have >= n:
            break
    pts = np.concatenate(pts)[:n]
    if len(pts) == 0:
        raise ValueError("could not sample interior points of the domain")
    return pts


def exterior_measure_lb(D: Domain, R: float, n_samples: int = 2000, *, inner_samples: int = 4000,
                        seed: int = 0) -> ExteriorMeasure:
    """Evidence for ``inf_x |B(x, R) \\ D| > 0`` from sampled centres ``x in D``.

    The measure around each centre is exact for intervals, lattice holes and
    punctured space, and Monte-Carlo (``inner_samples`` points) otherwise.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    rng = np.random.default_rng(seed)
    xs = _sample_points(D, n_samples, rng)
    se = np.zeros(len(xs))
    if isinstance(D, IntervalUnion):
        vals = _exterior_1d(D, xs[:, 0], R)
    elif isinstance(D, PuncturedSpace):
        vals = np.zeros(len(xs))
    elif isinstance(D, LatticeHoles):
        r = D.hole_radius
        k = int(math.ceil(R + r)) + 1
        offs = np.stack(np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1), indexing="ij"), -1).reshape(-1, 2)
        base = np.round(xs)
        vals = np.zeros(len(xs))
        for o in offs:
            d = np.linalg.norm(xs - (base + o), axis=1)
            vals += _lens_area(d, R, r)
    else:
        vol = math.pi ** (D.dim / 2) / math.gamma(D.dim / 2 + 1) * R ** D.dim
        vals = np.empty(len(xs))
        for i, x in enumerate(xs):
            g = rng.standard_normal((inner_samples, D.dim))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            rad = R * rng.uniform(size=(inner_samples, 1)) ** (1.0 / D.dim)
            outside = ~D.contains(x + rad * g)
            frac = outside.mean()
            vals[i] = vol * frac
            se[i] = vol * math.sqrt(frac * (1 - frac) / inner_samples)
    i = int(np.argmin(vals))
    return ExteriorMeasure(float(vals[i]), float(se[i]), tuple(xs[i]), len(xs))


# ---------------------------------------------------------------------------
# specs

def domain_from_spec(spec: dict) -> Domain:
    """Build a domain from its JSON object; see the README for the field names."""
    if not isinstance(spec, dict) or "shape" not in spec:
        raise DomainSpecError("domain spec must be an object with a 'shape' field")
    shape = spec["shape"]
    try:
        if shape == "interval_union":
            return IntervalUnion(tuple(tuple(iv) for iv in spec["intervals"]))
        if shape == "interval":
            return IntervalUnion(((spec["lo"], spec["hi"]),))
        if shape == "box":
            return Box(tuple(spec["lo"]), tuple(spec["hi"]))
        if shape == "ball":
            return Ball(tuple(spec["center"]), float(spec["radius"]))
        if shape == "annulus_union":
            return AnnulusUnion(tuple(spec["center"]), tuple(tuple(r) for r in spec["radii"]))
        if shape == "punctured_space":
            return PuncturedSpace(tuple(spec.get("point", [0.0] * int(spec.get("dim", 1)))))
        if shape == "complement_of_box":
            return ComplementOfBox(Box(tuple(spec["lo"]), tuple(spec["hi"])))
        if shape == "half_space_above_graph":
            return HalfSpaceAboveGraph(tuple(tuple(k) for k in spec["knots"]),
                                       float(spec.get("left_slope", 0.0)), float(spec.get("right_slope", 0.0)))
        if shape == "strip_union":
            return StripUnion(IntervalUnion(tuple(tuple(iv) for iv in spec["intervals"])))
        if shape == "lattice_holes":
            return LatticeHoles(float(spec.get("hole_radius", 0.1)))
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainSpecError(f"bad {shape} spec: {exc}") from exc
    raise DomainSpecError(f"unknown shape {shape!r}")


def parse_domain(text: str) -> Domain:
    """Compact CLI form: ``interval:0,1``, ``intervals:0,1,2,5``, ``box2d``, ``box:0,1,0,1``, ``ball:r``."""
    name, _, rest = text.partition(":")
    vals: Sequence[float] = [float(v) for v in rest.split(",") if v.strip()] if rest else []
    if name == "interval":
        if len(vals) != 2:
            raise DomainSpecError("interval needs lo,hi")
        return IntervalUnion(((vals[0], vals[1]),))
    if name == "intervals":
        if len(vals) % 2 or not vals:
            raise DomainSpecError("intervals needs an even number of endpoints")
        return IntervalUnion(tuple(zip(vals[::2], vals[1::2])))
    if name == "box2d":
        return Box((0.0, 0.0), (1.0, 1.0))
    if name == "box":
        if len(vals) % 2 or not vals:
            raise DomainSpecError("box needs lo1,hi1,lo2,hi2,...")
        return Box(tuple(vals[::2]), tuple(vals[1::2]))
    if name == "ball":
        if len(vals) != 1:
            raise DomainSpecError("ball needs a radius (centred at 0 in one dimension)")
        return IntervalUnion(((-vals[0], vals[0]),))
    raise DomainSpecError(f"unknown domain shorthand {name!r}")
