"""Test functions: a small closed-form catalog plus cubic B-spline combinations.

Every function is compactly supported in a bounding box, is evaluated in a
vectorized way (``f(x)`` with ``x`` of shape ``(n,)`` in 1-D or ``(n, 2)``
in 2-D) and reports the abscissae where it is not smooth, so quadrature
can place cell boundaries there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse

from .domain import Box, Domain, IntervalUnion

__all__ = [
    "TestFunction", "Zero", "Constant", "Polynomial", "Hat", "TensorProduct", "Cutoff", "SplineCombo",
    "LineRestriction", "smoothstep", "cubic_bspline", "CutoffError",
]


class CutoffError(ValueError):
    pass


class TestFunction:
    """Base class.  Subclasses set ``dim`` and implement ``__call__``/``grad``."""

    __test__ = False  # keep pytest from collecting the class by name
    dim: int = 1

    def __call__(self, x) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def support_box(self) -> tuple[np.ndarray, np.ndarray]:  # pragma: no cover - abstract
        raise NotImplementedError

    def breakpoints(self, axis: int = 0) -> np.ndarray:
        lo, hi = self.support_box()
        return np.array([lo[axis], hi[axis]])

    def support_components(self) -> list[tuple[float, float]]:
        """1-D only: disjoint closed intervals outside of which ``f`` vanishes."""
        lo, hi = self.support_box()
        return [(float(lo[0]), float(hi[0]))]

    def sup_abs(self) -> float:
        lo, hi = self.support_box()
        if self.dim == 1:
            x = np.linspace(lo[0], hi[0], 4001)
        else:
            g = [np.linspace(lo[i], hi[i], 201) for i in range(self.dim)]
            x = np.stack(np.meshgrid(*g, indexing="ij"), -1).reshape(-1, self.dim)
        return float(np.max(np.abs(self(x))))

    def sup_grad(self) -> float:
        lo, hi = self.support_box()
        if self.dim == 1:
            x = np.linspace(lo[0], hi[0], 4001)
            return float(np.max(np.abs(self.grad(x))))
        g = [np.linspace(lo[i], hi[i], 201) for i in range(self.dim)]
        x = np.stack(np.meshgrid(*g, indexing="ij"), -1).reshape(-1, self.dim)
        return float(np.max(np.linalg.norm(self.grad(x), axis=1)))

    def to_spec(self) -> dict:
        return {"kind": type(self).__name__}


def _x1(x):
    return np.asarray(x, dtype=float).reshape(-1)


def _inside(x, lo, hi):
    return (x > lo) & (x < hi)


@dataclass(frozen=True)
class Zero(TestFunction):
    lo: tuple[float, ...] = (0.0,)
    hi: tuple[float, ...] = (1.0,)

    @property
    def dim(self):
        return len(self.lo)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[0] if self.dim > 1 else x.size)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape if self.dim > 1 else x.size)

    def support_box(self):
        return np.array(self.lo), np.array(self.hi)


@dataclass(frozen=True)
class Constant(TestFunction):
    """``value`` on the open box ``(lo, hi)`` and 0 outside."""

    value: float
    lo: tuple[float, ...] = (0.0,)
    hi: tuple[float, ...] = (1.0,)

    @property
    def dim(self):
        return len(self.lo)

    def __call__(self, x):
        if self.dim == 1:
            x = _x1(x)
            return np.where(_inside(x, self.lo[0], self.hi[0]), self.value, 0.0)
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        ins = np.all((x > np.array(self.lo)) & (x < np.array(self.hi)), axis=1)
        return np.where(ins, self.value, 0.0)

    def grad(self, x):
        if self.dim == 1:
            return np.zeros(_x1(x).size)
        return np.zeros(np.asarray(x, dtype=float).reshape(-1, self.dim).shape)

    def support_box(self):
        return np.array(self.lo), np.array(self.hi)

    def to_spec(self):
        return {"kind": "constant", "value": self.value, "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Polynomial(TestFunction):
    """``sum_k coeffs[k] x**k`` on ``(a, b)``, zero outside."""

    coeffs: tuple[float, ...]
    a: float = 0.0
    b: float = 1.0

    def __call__(self, x):
        x = _x1(x)
        return np.where(_inside(x, self.a, self.b), np.polynomial.polynomial.polyval(x, self.coeffs), 0.0)

    def grad(self, x):
        x = _x1(x)
        d = np.polynomial.polynomial.polyder(self.coeffs) if len(self.coeffs) > 1 else [0.0]
        return np.where(_inside(x, self.a, self.b), np.polynomial.polynomial.polyval(x, d), 0.0)

    def support_box(self):
        return np.array([self.a]), np.array([self.b])

    def to_spec(self):
        return {"kind": "polynomial", "coeffs": list(self.coeffs), "a": self.a, "b": self.b}

    @classmethod
    def bump(cls, a: float = 0.0, b: float = 1.0, power: int = 2) -> "Polynomial":
        """``((x - a)(b - x))**power`` normalised to peak value 1."""
        base = np.polynomial.polynomial.polyfromroots([a, b]) * -1.0
        c = np.polynomial.polynomial.polypow(base, power) / ((b - a) / 2.0) ** (2 * power)
        return cls(tuple(float(v) for v in c), a, b)


@dataclass(frozen=True)
class Hat(TestFunction):
    """Piecewise-linear hat: 0 at ``a`` and ``b``, 1 at ``c``."""

    a: float = 0.0
    c: float = 0.5
    b: float = 1.0

    def __call__(self, x):
        x = _x1(x)
        up = (x - self.a) / (self.c - self.a)
        down = (self.b - x) / (self.b - self.c)
        return np.clip(np.minimum(up, down), 0.0, None)

    def grad(self, x):
        x = _x1(x)
        return np.where(_inside(x, self.a, self.c), 1.0 / (self.c - self.a),
                        np.where(_inside(x, self.c, self.b), -1.0 / (self.b - self.c), 0.0))

    def support_box(self):
        return np.array([self.a]), np.array([self.b])

    def breakpoints(self, axis=0):
        return np.array([self.a, self.c, self.b])

    def to_spec(self):
        return {"kind": "hat", "a": self.a, "c": self.c, "b": self.b}


@dataclass(frozen=True)
class TensorProduct(TestFunction):
    """``f(x1, x2) = f1(x1) f2(x2)`` from two 1-D factors."""

    f1: TestFunction
    f2: TestFunction
    dim: int = field(default=2, init=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float).reshape(-1, 2)
        return self.f1(x[:, 0]) * self.f2(x[:, 1])

    def grad(self, x):
        x = np.asarray(x, dtype=float).reshape(-1, 2)
        a, b = self.f1(x[:, 0]), self.f2(x[:, 1])
        return np.stack([self.f1.grad(x[:, 0]) * b, a * self.f2.grad(x[:, 1])], axis=1)

    def support_box(self):
        (l1, h1), (l2, h2) = self.f1.support_box(), self.f2.support_box()
        return np.array([l1[0], l2[0]]), np.array([h1[0], h2[0]])

    def breakpoints(self, axis=0):
        return (self.f1 if axis == 0 else self.f2).breakpoints(0)

    def to_spec(self):
        return {"kind": "tensor", "f1": self.f1.to_spec(), "f2": self.f2.to_spec()}


def smoothstep(delta, eps):
    """0 for ``delta <= eps/2``, 1 for ``delta >= eps``, cubic ``3u^2 - 2u^3`` in between."""
    u = np.clip((np.asarray(delta, dtype=float) - 0.5 * eps) / (0.5 * eps), 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _smoothstep_d(delta, eps):
    u = np.clip((np.asarray(delta, dtype=float) - 0.5 * eps) / (0.5 * eps), 0.0, 1.0)
    return 6.0 * u * (1.0 - u) / (0.5 * eps)


@dataclass(frozen=True)
class Cutoff(TestFunction):
    """Boundary-layer cutoff: 1 where ``delta_x >= eps``, 0 where ``delta_x <= eps/2``.

    On an interval union the profile is ``smoothstep(delta_x)``; on a box it
    is the product of the per-axis profiles, which has the same 0 and 1 sets.
    The gradient is bounded by ``3/eps``.
    """

    domain: Domain
    eps: float

    def __post_init__(self):
        if not isinstance(self.domain, (IntervalUnion, Box)):
            raise CutoffError("cutoffs are available on interval unions and boxes")
        if not self.eps > 0:
            raise CutoffError("eps must be positive")
        if self.eps >= self.domain.ball_condition():
            raise CutoffError(f"eps={self.eps} leaves no interior region (inradius {self.domain.ball_condition()})")

    @property
    def dim(self):
        return self.domain.dim

    def _axis(self, axis):
        if isinstance(self.domain, Box):
            return [(self.domain.lo[axis], self.domain.hi[axis])]
        return list(self.domain.intervals)

    def _profile(self, x, axis, deriv=False):
        out = np.zeros_like(x)
        for a, b in self._axis(axis):
            ins = _inside(x, a, b)
            d = np.minimum(x - a, b - x)
            if deriv:
                sgn = np.where(x - a <= b - x, 1.0, -1.0)
                out = np.where(ins, sgn * _smoothstep_d(d, self.eps), out)
            else:
                out = np.where(ins, smoothstep(d, self.eps), out)
        return out

    def __call__(self, x):
        if self.dim == 1:
            return self._profile(_x1(x), 0)
        x = np.asarray(x, dtype=float).reshape(-1, 2)
        return self._profile(x[:, 0], 0) * self._profile(x[:, 1], 1)

    def grad(self, x):
        if self.dim == 1:
            return self._profile(_x1(x), 0, deriv=True)
        x = np.asarray(x, dtype=float).reshape(-1, 2)
        p0, p1 = self._profile(x[:, 0], 0), self._profile(x[:, 1], 1)
        return np.stack([self._profile(x[:, 0], 0, True) * p1, p0 * self._profile(x[:, 1], 1, True)], axis=1)

    def support_box(self):
        h = 0.5 * self.eps
        if self.dim == 1:
            return np.array([self.domain.intervals[0][0] + h]), np.array([self.domain.intervals[-1][1] - h])
        return np.array(self.domain.lo) + h, np.array(self.domain.hi) - h

    def support_components(self):
        h = 0.5 * self.eps
        return [(a + h, b - h) for a, b in self._axis(0)]

    def breakpoints(self, axis=0):
        e = self.eps
        pts = []
        for a, b in self._axis(axis):
            pts += [a + e / 2, a + e, 0.5 * (a + b), b - e, b - e / 2]
        return np.unique(pts)

    def to_spec(self):
        return {"kind": "cutoff", "eps": self.eps, "domain": self.domain.to_spec()}


# ---------------------------------------------------------------------------
# cubic B-splines on uniform knots

def cubic_bspline(u, deriv: int = 0):
    """Cardinal cubic B-spline supported on ``[0, 4]`` (or its derivative)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    c0 = (u >= 0) & (u < 1)
    c1 = (u >= 1) & (u < 2)
    c2 = (u >= 2) & (u < 3)
    c3 = (u >= 3) & (u < 4)
    if deriv == 0:
        out[c0] = u[c0] ** 3 / 6
        v = u[c1]
        out[c1] = (-3 * v ** 3 + 12 * v ** 2 - 12 * v + 4) / 6
        v = u[c2]
        out[c2] = (3 * v ** 3 - 24 * v ** 2 + 60 * v - 44) / 6
        out[c3] = (4 - u[c3]) ** 3 / 6
    else:
        out[c0] = u[c0] ** 2 / 2
        v = u[c1]
        out[c1] = (-9 * v ** 2 + 24 * v - 12) / 6
        v = u[c2]
        out[c2] = (9 * v ** 2 - 48 * v + 60) / 6
        out[c3] = -((4 - u[c3]) ** 2) / 2
    return out


def graded_map(xi, grading: float):
    """Symmetric map of ``[0, 1]`` onto itself that clusters points toward both ends."""
    xi = np.asarray(xi, dtype=float)
    if grading == 1.0:
        return xi
    left = 0.5 * (2.0 * xi) ** grading
    right = 1.0 - 0.5 * (2.0 * (1.0 - xi)) ** grading
    return np.where(xi <= 0.5, left, right)


@dataclass(frozen=True)
class SplinePiece:
    a: float
    b: float
    cells: int
    grading: float = 1.0

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.cells

    @property
    def nbasis(self) -> int:
        return self.cells - 3

    def knots(self) -> np.ndarray:
        k = self.a + (self.b - self.a) * graded_map(np.arange(self.cells + 1) / self.cells, self.grading)
        k[0], k[-1] = self.a, self.b
        return k

    def extended_knots(self) -> np.ndarray:
        k = self.knots()
        left = self.a - (k[1] - k[0]) * np.arange(3, 0, -1)
        right = self.b + (k[-1] - k[-2]) * np.arange(1, 4)
        return np.concatenate([left, k, right])

    def as_tuple(self):
        return (self.a, self.b, self.cells) if self.grading == 1.0 else (self.a, self.b, self.cells, self.grading)


def _basis_funs(t: np.ndarray, x: np.ndarray, deriv: int = 0):
    """Nonzero cubic B-splines at ``x`` (Cox-de Boor, vectorized) or their derivatives.

    Returns ``(span, V)``: ``x`` lies in ``[t[span], t[span+1])`` and
    ``V[:, r]`` belongs to the B-spline with index ``span - 3 + r``.
    """
    span = np.clip(np.searchsorted(t, x, side="right") - 1, 3, t.size - 5)
    N = [np.ones(x.size)]
    left = [None] + [x - t[span + 1 - j] for j in range(1, 4)]
    right = [None] + [t[span + j] - x for j in range(1, 4)]
    N2 = None
    for j in range(1, 4 if not deriv else 3):
        saved = 0.0
        new = []
        for r in range(j):
            temp = N[r] / (right[r + 1] + left[j - r])
            new.append(saved + right[r + 1] * temp)
            saved = left[j - r] * temp
        new.append(saved)
        N = new
        if j == 2:
            N2 = N
    if not deriv:
        return span, np.stack(N, axis=1)
    # B'_{k,3} = 3 (B_{k,2}/(t_{k+3}-t_k) - B_{k+1,2}/(t_{k+4}-t_{k+1})); degree-2 index span-2+r
    dN = []
    for r in range(4):
        k = span - 3 + r
        d = 0.0
        if r >= 1:
            d = d + 3.0 * N2[r - 1] / (t[k + 3] - t[k])
        if r <= 2:
            d = d - 3.0 * N2[r] / (t[k + 4] - t[k + 1])
        dN.append(d)
    return span, np.stack(dN, axis=1)


class SplineCombo(TestFunction):
    """Combination of the cubic B-splines that live entirely inside each piece.

    A piece ``(a, b)`` split into ``cells`` cells carries ``cells - 3`` basis
    functions, so every combination vanishes with two derivatives at ``a``
    and ``b`` and is compactly supported in the closed piece.  Cells are
    uniform unless a ``grading`` exponent above 1 clusters the knots toward
    both ends of the piece; knot sets of ``n`` and ``2n`` cells are nested,
    so the spline spaces are too.
    """

    def __init__(self, pieces: Sequence[tuple], coeffs):
        self.pieces = tuple(SplinePiece(float(pc[0]), float(pc[1]), int(pc[2]),
                                        float(pc[3]) if len(pc) > 3 else 1.0) for pc in pieces)
        for p in self.pieces:
            if p.cells < 4:
                raise ValueError("each spline piece needs at least 4 cells")
            if p.grading < 1.0:
                raise ValueError("grading must be >= 1")
        self.coeffs = np.asarray(coeffs, dtype=float).copy()
        if self.coeffs.size != self.nbasis:
            raise ValueError(f"expected {self.nbasis} coefficients, got {self.coeffs.size}")
        self.coeffs.setflags(write=False)

    dim = 1

    @property
    def nbasis(self) -> int:
        return sum(p.nbasis for p in self.pieces)

    @classmethod
    def on(cls, domain: IntervalUnion, cells: int, coeffs=None, grading: float = 1.0) -> "SplineCombo":
        pieces = [(a, b, cells, grading) for a, b in domain.intervals]
        n = sum(c - 3 for _, _, c, _ in pieces)
        return cls(pieces, np.zeros(n) if coeffs is None else coeffs)

    def with_coeffs(self, coeffs) -> "SplineCombo":
        return SplineCombo([p.as_tuple() for p in self.pieces], coeffs)

    def _local(self, x, deriv: int):
        """Per piece: indices of ``x`` inside it, coefficient columns and local basis values."""
        x = _x1(x)
        out = []
        offset = 0
        for p in self.pieces:
            idx = np.nonzero((x > p.a) & (x < p.b))[0]
            span, V = _basis_funs(p.extended_knots(), x[idx], deriv)
            cols = span[:, None] - 6 + np.arange(4)[None, :]
            out.append((idx, cols, V, offset, p.nbasis))
            offset += p.nbasis
        return x.size, out

    def basis_matrix(self, x, deriv: int = 0) -> sparse.csr_matrix:
        """Sparse ``(len(x), nbasis)`` matrix of basis values (or derivatives)."""
        n, parts = self._local(x, deriv)
        rows, cols, vals = [], [], []
        for idx, c, v, off, nb in parts:
            ok = (c >= 0) & (c < nb)
            rows.append(np.broadcast_to(idx[:, None], c.shape)[ok])
            cols.append(c[ok] + off)
            vals.append(v[ok])
        return sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                 shape=(n, self.nbasis))

    def _eval(self, x, deriv: int):
        n, parts = self._local(x, deriv)
        out = np.zeros(n)
        for idx, c, v, off, nb in parts:
            ok = (c >= 0) & (c < nb)
            coef = np.where(ok, self.coeffs[np.clip(c, 0, nb - 1) + off], 0.0)
            out[idx] = np.sum(v * coef, axis=1)
        return out

    def __call__(self, x):
        return self._eval(x, 0)

    def grad(self, x):
        return self._eval(x, 1)

    def support_box(self):
        return np.array([self.pieces[0].a]), np.array([self.pieces[-1].b])

    def support_components(self):
        return [(p.a, p.b) for p in self.pieces]

    def breakpoints(self, axis=0):
        return np.unique(np.concatenate([p.knots() for p in self.pieces]))

    def refined(self) -> "SplineCombo":
        """The same function on the nested knot set with twice as many cells."""
        fine = SplineCombo([(p.a, p.b, 2 * p.cells, p.grading) for p in self.pieces], np.zeros(
            sum(2 * p.cells - 3 for p in self.pieces)))
        if all(p.grading == 1.0 for p in self.pieces):
            mask = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 8.0
            new_c, off = [], 0
            for p in self.pieces:
                c = self.coeffs[off:off + p.nbasis]
                off += p.nbasis
                fc = np.zeros(2 * p.cells - 3)
                for j, cj in enumerate(c):
                    fc[2 * j:2 * j + 5] += cj * mask
                new_c.append(fc)
            return fine.with_coeffs(np.concatenate(new_c))
        # nested spaces: a least-squares fit on the fine cells reproduces the function exactly
        x0, _ = np.polynomial.legendre.leggauss(4)
        br = fine.breakpoints()
        pts = (0.5 * (br[:-1] + br[1:])[:, None] + 0.5 * np.diff(br)[:, None] * x0).ravel()
        B = fine.basis_matrix(pts).toarray()
        c, *_ = np.linalg.lstsq(B, self(pts), rcond=None)
        return fine.with_coeffs(c)

    def scaled(self, t: float) -> "SplineCombo":
        """``x -> f(x / t)`` on the dilated pieces."""
        return SplineCombo([(t * p.a, t * p.b, p.cells, p.grading) for p in self.pieces], self.coeffs)

    def to_spec(self):
        return {"kind": "spline", "pieces": [list(p.as_tuple()) for p in self.pieces],
                "coeffs": self.coeffs.tolist()}

    def __repr__(self):
        return f"SplineCombo(pieces={[p.as_tuple() for p in self.pieces]})"


@dataclass(frozen=True)
class LineRestriction(TestFunction):
    """``g(t) = f(base + t * omega)`` for a 2-D ``f``."""

    f: TestFunction
    base: tuple[float, float]
    omega: tuple[float, float]

    def _pts(self, t):
        t = _x1(t)
        return np.asarray(self.base)[None, :] + t[:, None] * np.asarray(self.omega)[None, :]

    def __call__(self, t):
        return self.f(self._pts(t))

    def grad(self, t):
        return self.f.grad(self._pts(t)) @ np.asarray(self.omega)

    def _param_range(self):
        lo, hi = self.f.support_box()
        t0, t1 = -math.inf, math.inf
        for b, w, l, h in zip(self.base, self.omega, lo, hi):
            if abs(w) < 1e-15:
                if not l <= b <= h:
                    return 0.0, 0.0
                continue
            u, v = (l - b) / w, (h - b) / w
            t0, t1 = max(t0, min(u, v)), min(t1, max(u, v))
        return (t0, t1) if t1 > t0 else (0.0, 0.0)

    def support_box(self):
        t0, t1 = self._param_range()
        return np.array([t0]), np.array([t1])

    def breakpoints(self, axis=0):
        t0, t1 = self._param_range()
        pts = [t0, t1]
        for ax in range(2):
            w = self.omega[ax]
            if abs(w) < 1e-15:
                continue
            for bp in self.f.breakpoints(ax):
                t = (bp - self.base[ax]) / w
                if t0 < t < t1:
                    pts.append(t)
        return np.unique(pts)
