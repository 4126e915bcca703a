"""Low-level quadrature primitives shared by the gauge and modular code.

Everything here works on vectorized callables: ``f(x)`` receives a 1-D
array of abscissae and returns an array of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["QuadResult", "QuadratureError", "gauss_legendre", "adaptive_gk", "composite_gauss"]


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be evaluated to any useful accuracy."""


@dataclass(frozen=True)
class QuadResult:
    """Value of an integral together with its error bookkeeping.

    ``converged`` implies ``abs_error_estimate <= tol_abs + tol_rel * value``
    for the tolerances the integral was requested at.
    """

    value: float
    abs_error_estimate: float
    panels: int
    converged: bool

    def __float__(self) -> float:
        return float(self.value)

    @property
    def divergent(self) -> bool:
        return math.isinf(self.value)


# Gauss-Kronrod 7/15 on [-1, 1]; the Gauss nodes are the odd-indexed Kronrod nodes.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

_K_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[1:7:2] = _WG[:3]
_G_WEIGHTS[7] = _WG[3]
_G_WEIGHTS[9:14:2] = _WG[:3][::-1]


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_gauss(breaks, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule with ``n`` nodes on every cell between sorted ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    if breaks.size < 2:
        return np.empty(0), np.empty(0)
    x0, w0 = gauss_legendre(n)
    lo = breaks[:-1, None]
    width = np.diff(breaks)[:, None]
    return (lo + width * x0).ravel(), (width * w0).ravel()


def _gk_panels(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _K_NODES[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        k = half * (fx @ _K_WEIGHTS)
        g = half * (fx @ _G_WEIGHTS)
        return k, np.abs(k - g)


def adaptive_gk(f, a: float, b: float, *, tol_abs: float = 0.0, tol_rel: float = 1e-10,
                breakpoints=(), max_panels: int = 4000) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7/15) integration of ``f`` over ``[a, b]``.

    Panels with the largest error estimates are bisected until the summed
    estimate drops below ``tol_abs + tol_rel * |value|``.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise QuadratureError("adaptive_gk needs a finite interval")
    if b <= a:
        return QuadResult(0.0, 0.0, 0, True)
    edges = np.unique(np.clip(np.concatenate([[a, b], np.asarray(breakpoints, float)]), a, b))
    lo, hi = edges[:-1], edges[1:]
    vals, errs = _gk_panels(f, lo, hi)
    if not np.all(np.isfinite(vals)):
        return QuadResult(math.inf, math.inf, len(lo), False)
    heap = [(-e, l, h, v) for l, h, v, e in zip(lo, hi, vals, errs)]
    heapq.heapify(heap)
    total = math.fsum(vals)
    err = math.fsum(errs)
    while err > tol_abs + tol_rel * abs(total) and len(heap) < max_panels:
        # split a batch of the worst panels at once to keep numpy calls large
        batch = [heapq.heappop(heap) for _ in range(min(len(heap), 32))]
        bl = np.array([p[1] for p in batch])
        bh = np.array([p[2] for p in batch])
        bm = 0.5 * (bl + bh)
        nv, ne = _gk_panels(f, np.concatenate([bl, bm]), np.concatenate([bm, bh]))
        if not np.all(np.isfinite(nv)):
            return QuadResult(math.inf, math.inf, len(heap) + 2 * len(batch), False)
        m = len(batch)
        for i in range(m):
            heapq.heappush(heap, (-ne[i], bl[i], bm[i], nv[i]))
            heapq.heappush(heap, (-ne[m + i], bm[i], bh[i], nv[m + i]))
        total = math.fsum(p[3] for p in heap)
        err = math.fsum(-p[0] for p in heap)
    converged = err <= tol_abs + tol_rel * abs(total)
    return QuadResult(total, err, len(heap), converged)
