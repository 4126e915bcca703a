"""Modular integrals: ``int A(|f|)``, ``int A(|f|/delta^s)`` and the
Gagliardo-type double integral ``iint A(|f(x)-f(y)|/|x-y|^s) |x-y|^-N``.

One-dimensional integrals are assembled as *rules*: batches of nodes and
weights such that the integral equals ``sum w * Phi(scale * |u|)``, where
``u`` is a difference, a value or a derivative of ``f`` and ``Phi`` is
either ``A`` or ``Lambda(z) = int_0^z A(t)/t dt``.  A rule depends only on
the geometry and on the break points of ``f``, so the variational code can
reuse one rule for many coefficient vectors.

The singular parts are handled analytically:

* pairs closer than ``h_tail`` contribute ``Lambda(|f'| h_tail^(1-s))/(1-s)``
  per ordered pair to leading order;
* pairs with ``f(y) = 0`` (``y`` outside the support) are integrated in
  closed form over ``y``, which gives ``Lambda`` differences, so no far-field
  truncation radius is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import Ball, Box, Domain, IntervalUnion
from .nfunction import NFunction
from .quadrature import QuadResult, composite_gauss, gauss_legendre
from .trial import LineRestriction, TestFunction

__all__ = [
    "Resolution", "Terms", "Rule", "modular_LA", "modular_hardy", "modular_WsA", "polar_identity_check",
    "rule_LA", "rule_hardy", "rule_WsA", "evaluate", "as_intervals", "core_components",
]

TOL_1D = 1e-6
TOL_2D = 1e-4
TOL_LA = 1e-8
DIVERGENCE_SHELLS = 8
MAX_H_BREAKS = 96
H_FLOOR = 1e-8


@dataclass(frozen=True)
class Resolution:
    order: int = 8       # Gauss nodes per cell
    levels: int = 40     # dyadic grading levels toward singular points
    split: int = 1       # uniform sub-cells per x-cell (2-D only; |u| kinks follow curves there)

    def finer(self) -> "Resolution":
        return Resolution(self.order + 4, self.levels + 10)


LADDER = (Resolution(6, 30), Resolution(10, 40), Resolution(16, 50), Resolution(24, 60))
LADDER_2D = (Resolution(6, 24, 1), Resolution(6, 32, 2), Resolution(6, 40, 4))


@dataclass
class Terms:
    """A batch of quadrature nodes contributing ``sum w * Phi(scale * |u|)``."""

    kind: str              # "diff": u = f(y) - f(x); "value": u = f(x); "deriv": u = f'(x)
    phi: str               # "A" or "lam"
    x: np.ndarray
    w: np.ndarray
    scale: np.ndarray
    y: np.ndarray | None = None
    shell: np.ndarray | None = None   # grading level of each node, -1 if not graded

    def __len__(self):
        return self.w.size


@dataclass
class Rule:
    terms: list[Terms] = field(default_factory=list)
    tail_bound: float = 0.0

    def add(self, t: Terms | None):
        if t is not None and len(t):
            self.terms.append(t)

    @property
    def nodes(self) -> int:
        return sum(len(t) for t in self.terms)


def _u(t: Terms, f) -> np.ndarray:
    if t.kind == "diff":
        return f(t.y) - f(t.x)
    if t.kind == "value":
        return f(t.x)
    return f.grad(t.x)


def _phi(nf: NFunction, t: Terms, u) -> np.ndarray:
    z = t.scale * np.abs(u)
    return nf(z) if t.phi == "A" else nf.lam(z)


def term_values(nf: NFunction, t: Terms, f) -> np.ndarray:
    return t.w * _phi(nf, t, _u(t, f))


def evaluate(rule: Rule, nf: NFunction, f) -> float:
    """``sum`` over all terms, summed in a fixed order (pairwise within numpy)."""
    return float(math.fsum(float(np.sum(term_values(nf, t, f))) for t in rule.terms))


# ---------------------------------------------------------------------------
# one-dimensional geometry helpers

def as_intervals(D: Domain) -> IntervalUnion:
    if isinstance(D, IntervalUnion):
        return D
    if isinstance(D, Ball) and D.dim == 1:
        return D.as_interval()
    if isinstance(D, Box) and D.dim == 1:
        return IntervalUnion(((D.lo[0], D.hi[0]),))
    raise TypeError(f"{type(D).__name__} is not a one-dimensional domain")


def core_components(D: IntervalUnion, f: TestFunction) -> list[tuple[float, float]]:
    """Intervals of ``D`` intersected with the support components of ``f``."""
    out = []
    for a, b in D.intervals:
        for c, d in f.support_components():
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    return sorted(out)


def _bps(f: TestFunction, lo: float, hi: float) -> np.ndarray:
    b = np.asarray(f.breakpoints(0), dtype=float)
    return np.unique(np.concatenate([[lo, hi], b[(b > lo) & (b < hi)]]))


def _pieces_outside(cores, region_intervals) -> list[tuple[float, float]]:
    """``region`` minus the union of ``cores`` as closed pieces."""
    out = []
    for a, b in region_intervals:
        cur = a
        for c, d in cores:
            if d <= cur or c >= b:
                continue
            if c > cur:
                out.append((cur, c))
            cur = max(cur, d)
        if cur < b:
            out.append((cur, b))
    return out


def _graded(lo: float, hi: float, bps: np.ndarray, grade_lo: bool, grade_hi: bool, levels: int):
    """Cell breaks on ``[lo, hi]`` plus dyadic refinement toward flagged ends.

    Returns ``(breaks, shell)``.  A graded cell at level ``k`` (0 = outermost)
    gets label ``2k`` toward ``lo`` and ``2k + 1`` toward ``hi``; the innermost
    remainder cell continues the numbering; ordinary cells get -1.
    """
    base = np.unique(np.concatenate([[lo, hi], bps[(bps > lo) & (bps < hi)]]))
    extra_lo = extra_hi = np.empty(0)
    if grade_lo or grade_hi:
        levels = min(levels, _depth(base[1] - lo, lo), _depth(hi - base[-2], hi))
    if grade_lo:
        first = base[1] - lo
        extra_lo = lo + first * 2.0 ** -np.arange(1, levels + 1)
    if grade_hi:
        last = hi - base[-2]
        extra_hi = hi - last * 2.0 ** -np.arange(1, levels + 1)
    br = np.unique(np.concatenate([base, extra_lo, extra_hi]))
    shell = np.full(br.size - 1, -1)
    if grade_lo:
        # cells [lo + first*2^-(k+1), lo + first*2^-k] are level k; the innermost is level `levels`
        shell[:levels + 1] = 2 * np.arange(levels, -1, -1)
    if grade_hi:
        shell[br.size - 1 - (levels + 1):] = 2 * np.arange(0, levels + 1) + 1
    return br, shell


def _geometric(lo: float, hi: float, bps: np.ndarray, sing) -> np.ndarray:
    """Break points on ``[lo, hi]`` with cells growing geometrically away from each point of ``sing``.

    ``sing`` holds points outside ``(lo, hi)`` (or at its ends) where the
    integrand is singular; a cell at distance ``d`` gets width at most ``d``.
    """
    base = np.unique(np.concatenate([[lo, hi], bps[(bps > lo) & (bps < hi)]]))
    extra = []
    for e in sing:
        if not math.isfinite(e) or lo < e < hi:
            continue
        side = 1.0 if e <= lo else -1.0
        r = lo - e if side > 0 else e - hi
        if r > 0:
            d = r * (1.0 + 2.0 ** np.arange(0, 64))
        else:
            near = base[1] - lo if side > 0 else hi - base[-2]
            d = near * 2.0 ** np.arange(1, 64)
        pts = e + side * d
        extra.append(pts[(pts > lo) & (pts < hi)])
    return np.unique(np.concatenate([base] + extra))


def _split_wide(hb: np.ndarray) -> np.ndarray:
    """Split panels ``[a, b]`` with ``b > 2a > 0`` at ``a 2^k`` (integrands decay like powers of h)."""
    extra = []
    for a, b in zip(hb[:-1], hb[1:]):
        if a > 0 and b > 2 * a:
            k = int(math.floor(math.log2(b / a)))
            extra.append(a * 2.0 ** np.arange(1, k + 1))
    return np.unique(np.concatenate([hb] + extra)) if extra else hb


def _depth(first: float, end: float) -> int:
    """Deepest dyadic level whose cells are still resolved in double precision near ``end``."""
    return max(1, int(math.log2(first / (1e-13 * max(1.0, abs(end))))))


def _cells(breaks: np.ndarray, order: int, split: int = 1):
    """Gauss nodes on every cell of each row of ``breaks`` (shape ``(..., m)``)."""
    if split > 1:
        t = np.arange(split) / split
        fine = (breaks[..., :-1, None] + np.diff(breaks, axis=-1)[..., None] * t)
        breaks = np.concatenate([fine.reshape(breaks.shape[:-1] + (-1,)), breaks[..., -1:]], axis=-1)
    x0, w0 = gauss_legendre(order)
    lo = breaks[..., :-1, None]
    wd = np.diff(breaks, axis=-1)[..., None]
    shape = breaks.shape[:-1] + (-1,)
    return (lo + wd * x0).reshape(shape), (wd * w0).reshape(shape)


def _row_roots(g, br: np.ndarray, iters: int = 60) -> np.ndarray:
    """Add the sign changes of ``g(x, row)`` inside each row of sorted breaks ``br``.

    Sign changes are looked for between consecutive breaks and 4-point Gauss
    nodes, then bisected.  Rows with fewer roots are padded with copies of
    their last break, which only creates empty cells.
    """
    nodes, _ = _cells(br, 4)
    P = np.sort(np.concatenate([br, nodes], axis=1), axis=1)
    rows = np.repeat(np.arange(P.shape[0]), P.shape[1])
    G = g(P.ravel(), rows).reshape(P.shape)
    r, c = np.nonzero(G[:, :-1] * G[:, 1:] < 0)
    if r.size == 0:
        return br
    a, b, ga = P[r, c], P[r, c + 1], G[r, c]
    for _ in range(iters):
        m = 0.5 * (a + b)
        gm = g(m, r)
        same = np.sign(gm) == np.sign(ga)
        a, ga, b = np.where(same, m, a), np.where(same, gm, ga), np.where(same, b, m)
    pos = np.arange(r.size) - np.searchsorted(r, r)
    pad = np.repeat(br[:, -1:], pos.max() + 1, axis=1)
    pad[r, pos] = 0.5 * (a + b)
    return np.sort(np.concatenate([br, pad], axis=1), axis=1)


def _zeros_of(f: TestFunction, bps: np.ndarray) -> np.ndarray:
    """``bps`` plus the interior zeros of ``f`` (kinks of ``A(|f|)``)."""
    a, b = np.nextafter(bps[0], bps[-1]), np.nextafter(bps[-1], bps[0])
    return np.unique(_row_roots(lambda x, r: f(np.clip(x, a, b)), bps[None, :])[0])


def _pair_terms(ci, cj, bi, bj, s, res: Resolution, weight: float, reverse: bool = False, f=None):
    """Ordered pairs ``x in ci``, ``y = x + h in cj`` with ``h > 0``.

    ``reverse`` swaps the roles so that ``y < x`` (used by the full-sum mode).
    Given ``f``, the x-cells of every h are also split where ``f(x + h) = f(x)``.
    Returns the pair terms and, for a self pair, the near-diagonal tail.
    """
    hlo = max(cj[0] - ci[1], 0.0)
    hhi = cj[1] - ci[0]
    if hhi <= 0:
        return None, None
    diffs = (bj[None, :] - bi[:, None]).ravel()
    diffs = np.unique(diffs[(diffs > hlo) & (diffs < hhi)])
    if diffs.size > MAX_H_BREAKS:
        # the h-integrand is smooth across most knot differences; keep a spread-out subset
        diffs = diffs[np.unique(np.round(np.geomspace(1, diffs.size, MAX_H_BREAKS)).astype(int) - 1)]
    hb = np.concatenate([[hlo], diffs, [hhi]])
    h_tail = 0.0
    if hlo == 0.0:
        first = hb[1]
        # below ~1e-8 of the length f(x+h) - f(x) is mostly rounding; the tail formula
        # (exact to second order after integrating in x) takes over there
        levels = max(1, min(res.levels, int(math.log2(first / (H_FLOOR * (hhi - hlo))))))
        dy = first * 2.0 ** -np.arange(1, levels + 1)
        h_tail = dy[-1]
        hb = np.unique(np.concatenate([dy, hb[1:]]))
    hb = _split_wide(hb)
    h, wh = composite_gauss(hb, res.order)
    xlo = np.maximum(ci[0], cj[0] - h)
    xhi = np.minimum(ci[1], cj[1] - h)
    pts = np.concatenate([bi[None, :].repeat(h.size, 0), bj[None, :] - h[:, None],
                          xlo[:, None], xhi[:, None]], axis=1)
    br = np.sort(np.clip(pts, xlo[:, None], xhi[:, None]), axis=1)
    if f is not None:
        # f vanishes on the ends of its open support; clamping keeps rounding from faking a sign change
        xa, xb = np.nextafter(ci[0], ci[1]), np.nextafter(ci[1], ci[0])
        ya, yb = np.nextafter(cj[0], cj[1]), np.nextafter(cj[1], cj[0])
        br = _row_roots(lambda x, r: f(np.clip(x + h[r], ya, yb)) - f(np.clip(x, xa, xb)), br)
    x, wx = _cells(br, res.order)
    y = x + h[:, None]
    w = weight * wh[:, None] * wx / h[:, None]
    scale = np.broadcast_to(h[:, None] ** -s, x.shape)
    keep = w > 0
    if reverse:
        x, y = y, x
    pair = Terms("diff", "A", x[keep], w[keep], scale[keep].copy(), y=y[keep])
    tail = None
    if h_tail > 0 and ci == cj:
        xt, wt = composite_gauss(bi, res.order)
        tail = Terms("deriv", "lam", xt, weight * wt / (1.0 - s), np.full(xt.size, h_tail ** (1.0 - s)))
    return pair, tail


def _far_terms(core, bps, pieces, s, res: Resolution, weight: float):
    """Pairs ``x in core`` and ``y`` in ``pieces`` (where ``f(y) = 0``), ``y`` done in closed form."""
    if not pieces:
        return []
    lo, hi = core
    touch_lo = any(abs(p[1] - lo) == 0 for p in pieces)
    touch_hi = any(abs(p[0] - hi) == 0 for p in pieces)
    sing = [v for p in pieces for v in p]
    br, _ = _graded(lo, hi, _geometric(lo, hi, bps, sing), touch_lo, touch_hi, res.levels)
    x, wx = composite_gauss(br, res.order)
    out = []
    for a, b in pieces:
        if b <= lo:
            d1, d2 = x - b, x - a
        else:
            d1, d2 = a - x, b - x
        with np.errstate(divide="ignore"):
            out.append(Terms("value", "lam", x, weight * wx / s, d1 ** -s))
            if math.isfinite(a) and math.isfinite(b):
                out.append(Terms("value", "lam", x, -weight * wx / s, d2 ** -s))
    return out


def rule_LA(D: Domain, f: TestFunction, res: Resolution = Resolution(), split: bool = False) -> Rule:
    """``split`` adds break points at the zeros of ``f``; the rule then depends on the values of ``f``."""
    rule = Rule()
    if f.dim == 1:
        for c in core_components(as_intervals(D), f):
            b = _bps(f, *c)
            x, w = composite_gauss(_zeros_of(f, b) if split else b, res.order)
            rule.add(Terms("value", "A", x, w, np.ones_like(x)))
        return rule
    X, W = _box_nodes(D, f, res)
    rule.add(Terms("value", "A", X, W, np.ones(W.size)))
    return rule


def rule_hardy(D: Domain, s: float, f: TestFunction, res: Resolution = Resolution(),
               split: bool = False) -> Rule:
    rule = Rule()
    if f.dim == 1:
        DI = as_intervals(D)
        ends = set(DI.boundary_points_1d())
        for c in core_components(DI, f):
            b = _bps(f, *c)
            if split:
                b = _zeros_of(f, b)
            mids = [0.5 * (a + bb) for a, bb in DI.intervals if c[0] < 0.5 * (a + bb) < c[1]]
            b = _geometric(c[0], c[1], np.unique(np.concatenate([b, mids])), ends)
            br, shell = _graded(c[0], c[1], b, c[0] in ends, c[1] in ends, res.levels)
            x, w = composite_gauss(br, res.order)
            sh = np.repeat(shell, res.order)
            delta = DI.dist_boundary(x)
            with np.errstate(divide="ignore"):
                rule.add(Terms("value", "A", x, w, delta ** -s, shell=sh))
        return rule
    X, W, sh = _box_nodes(D, f, res, grade=True)
    with np.errstate(divide="ignore"):
        rule.add(Terms("value", "A", X, W, D.dist_boundary(X) ** -s, shell=sh))
    return rule


def rule_WsA(D: Domain, s: float, f: TestFunction, region: str = "DxD", res: Resolution = Resolution(),
             full_sum: bool = False, split: bool = False) -> Rule:
    """One-dimensional Gagliardo rule (see the module docstring).

    ``split`` aligns cells with the kinks of ``A(|f(x) - f(y)|)`` and ``Lam(|f(x)|..)``.
    """
    if region not in ("DxD", "RNxRN"):
        raise ValueError("region must be 'DxD' or 'RNxRN'")
    DI = as_intervals(D)
    cores = core_components(DI, f)
    rule = Rule()
    bps = [_bps(f, *c) for c in cores]
    fs = f if split else None
    sym = 1.0 if full_sum else 2.0
    for i, ci in enumerate(cores):
        for j in range(i, len(cores)):
            pair, tail = _pair_terms(ci, cores[j], bps[i], bps[j], s, res, sym, f=fs)
            rule.add(pair)
            rule.add(tail)
            if full_sum:
                pair, tail = _pair_terms(ci, cores[j], bps[i], bps[j], s, res, 1.0, reverse=True, f=fs)
                rule.add(pair)
                rule.add(tail)
    region_ivs = DI.intervals if region == "DxD" else ((-math.inf, math.inf),)
    pieces = _pieces_outside(cores, region_ivs)
    for c, b in zip(cores, bps):
        for t in _far_terms(c, _zeros_of(f, b) if split else b, pieces, s, res, 2.0):
            rule.add(t)
    return rule


# ---------------------------------------------------------------------------
# two-dimensional boxes

def _require_box(D: Domain) -> Box:
    if not isinstance(D, Box) or D.dim != 2:
        raise NotImplementedError("two-dimensional modulars are implemented for boxes")
    return D


def _axis_breaks(D: Box, f: TestFunction, axis: int):
    lo, hi = f.support_box()
    a, b = max(D.lo[axis], lo[axis]), min(D.hi[axis], hi[axis])
    bp = np.asarray(f.breakpoints(axis), float)
    return np.unique(np.concatenate([[a, b], bp[(bp > a) & (bp < b)]]))


def _box_nodes(D: Domain, f: TestFunction, res: Resolution, grade: bool = False):
    D = _require_box(D)
    parts = []
    for ax in range(2):
        br = _axis_breaks(D, f, ax)
        br = np.unique(np.concatenate([br, [0.5 * (D.lo[ax] + D.hi[ax])]]))
        br = br[(br >= D.lo[ax]) & (br <= D.hi[ax])]
        if grade:
            br, shell = _graded(br[0], br[-1], br, br[0] == D.lo[ax], br[-1] == D.hi[ax], res.levels)
        else:
            shell = np.full(br.size - 1, -1)
        x, w = composite_gauss(br, res.order)
        parts.append((x, w, np.repeat(shell, res.order)))
    (x0, w0, s0), (x1, w1, s1) = parts
    X = np.stack(np.meshgrid(x0, x1, indexing="ij"), -1).reshape(-1, 2)
    W = np.outer(w0, w1).ravel()
    sh = np.maximum.outer(s0, s1).ravel()
    return (X, W, sh) if grade else (X, W)


def _z_rects(breaks_1, breaks_2, levels):
    """Rectangles tiling the z-plane cells; cells with a corner at 0 get L-shaped dyadic annuli.

    Returns a list of ``(lo, hi)`` rectangles and the innermost squares left out.
    """
    rects, holes = [], []
    for i in range(breaks_1.size - 1):
        for j in range(breaks_2.size - 1):
            a1, b1 = breaks_1[i], breaks_1[i + 1]
            a2, b2 = breaks_2[j], breaks_2[j + 1]
            if (a1 == 0 or b1 == 0) and (a2 == 0 or b2 == 0):
                s1 = 1.0 if a1 == 0 else -1.0
                s2 = 1.0 if a2 == 0 else -1.0
                L1, L2 = b1 - a1, b2 - a2
                for k in range(levels):
                    r1, r2 = L1 * 2.0 ** -k, L2 * 2.0 ** -k
                    q1, q2 = 0.5 * r1, 0.5 * r2
                    for (u0, u1, v0, v1) in ((q1, r1, 0, q2), (0, q1, q2, r2), (q1, r1, q2, r2)):
                        lo = (min(s1 * u0, s1 * u1), min(s2 * v0, s2 * v1))
                        hi = (max(s1 * u0, s1 * u1), max(s2 * v0, s2 * v1))
                        rects.append((lo, hi))
                holes.append((L1 * 2.0 ** -levels, L2 * 2.0 ** -levels))
            else:
                rects.append(((a1, a2), (b1, b2)))
    return rects, holes


def _ws_box_dxd(nf: NFunction, D: Box, s: float, f: TestFunction, res: Resolution, chunk: int = 256):
    lo_s, hi_s = f.support_box()
    lo_s = np.maximum(lo_s, D.lo)
    hi_s = np.minimum(hi_s, D.hi)
    Dlo, Dhi = np.array(D.lo), np.array(D.hi)
    zb, bp = [], []
    for ax in range(2):
        b = np.asarray(f.breakpoints(ax), float)
        pts = np.unique(np.concatenate([[Dlo[ax], Dhi[ax], lo_s[ax], hi_s[ax]], b]))
        bp.append(pts)
        d = (pts[None, :] - pts[:, None]).ravel()
        L = Dhi[ax] - Dlo[ax]
        zb.append(np.unique(np.concatenate([d[np.abs(d) <= L], [0.0]])))
    rects, holes = _z_rects(zb[0], zb[1], res.levels)
    zo = res.order
    g0, gw = gauss_legendre(zo)
    R = np.array(rects)                         # (r, 2, 2)
    lo, wd = R[:, 0, :], R[:, 1, :] - R[:, 0, :]
    Z1 = lo[:, None, None, 0] + wd[:, None, None, 0] * g0[None, :, None]
    Z2 = lo[:, None, None, 1] + wd[:, None, None, 1] * g0[None, None, :]
    Z = np.stack(np.broadcast_arrays(Z1, Z2), -1).reshape(-1, 2)
    WZ = (wd[:, 0, None, None] * wd[:, 1, None, None] * gw[None, :, None] * gw[None, None, :]).ravel()
    keep = WZ > 0
    Z, WZ = Z[keep], WZ[keep]
    total = 0.0
    for k0 in range(0, Z.shape[0], chunk):
        z = Z[k0:k0 + chunk]
        wz = WZ[k0:k0 + chunk]
        xs, ws = [], []
        for ax in range(2):
            za = z[:, ax:ax + 1]
            a = np.maximum(np.maximum(Dlo[ax], Dlo[ax] - za), np.minimum(lo_s[ax], lo_s[ax] - za))
            b = np.minimum(np.minimum(Dhi[ax], Dhi[ax] - za), np.maximum(hi_s[ax], hi_s[ax] - za))
            b = np.maximum(a, b)
            pts = np.concatenate([a, b, bp[ax][None, :] + 0 * za, bp[ax][None, :] - za], axis=1)
            br = np.sort(np.clip(pts, a, b), axis=1)
            x, w = _cells(br, res.order, res.split)
            xs.append(x)
            ws.append(w)
        X1 = xs[0][:, :, None]
        X2 = xs[1][:, None, :]
        X = np.stack(np.broadcast_arrays(X1, X2), -1).reshape(z.shape[0], -1, 2)
        W = (ws[0][:, :, None] * ws[1][:, None, :]).reshape(z.shape[0], -1)
        Y = X + z[:, None, :]
        u = f(Y.reshape(-1, 2)) - f(X.reshape(-1, 2))
        r = np.linalg.norm(z, axis=1)
        vals = nf(np.abs(u).reshape(W.shape) * (r ** -s)[:, None])
        total += float(np.sum((W * vals).sum(axis=1) * wz / r ** 2))
    # innermost squares: |f(x+z) - f(x)| <= G |z| on the support
    G = f.sup_grad()
    area = float(np.prod(hi_s - lo_s))
    bound = 0.0
    for h1, h2 in holes:
        rho = math.hypot(h1, h2)
        bound += 0.5 * math.pi * float(nf.lam(G * rho ** (1.0 - s))) / (1.0 - s) * area
    return total, bound, len(rects)


def _ws_box_exterior(nf: NFunction, D: Box, s: float, f: TestFunction, res: Resolution):
    """``2 int_{x in D} int_{y notin D} A(|f(x)|/|x-y|^s) |x-y|^-2`` via rays leaving the (convex) box."""
    X, W, _ = _box_nodes(D, f, Resolution(res.order, min(res.levels, 12)), grade=True)
    fx = np.abs(f(X))
    keep = (fx > 0) & (W > 0)
    X, W, fx = X[keep], W[keep], fx[keep]
    Dlo, Dhi = np.array(D.lo), np.array(D.hi)
    g0, gw = gauss_legendre(res.order)
    total = 0.0
    for k0 in range(0, X.shape[0], 2048):
        x = X[k0:k0 + 2048]
        corners = np.array([[Dlo[0], Dlo[1]], [Dhi[0], Dlo[1]], [Dhi[0], Dhi[1]], [Dlo[0], Dhi[1]]])
        ang = np.arctan2(corners[None, :, 1] - x[:, None, 1], corners[None, :, 0] - x[:, None, 0])
        ang = np.sort(np.mod(ang, 2 * np.pi), axis=1)
        br = np.concatenate([np.zeros((x.shape[0], 1)), ang, np.full((x.shape[0], 1), 2 * np.pi)], axis=1)
        th, wt = _cells(br, res.order)
        c, sn = np.cos(th), np.sin(th)
        with np.errstate(divide="ignore", invalid="ignore"):
            tx = np.where(c > 0, (Dhi[0] - x[:, 0:1]) / c, np.where(c < 0, (Dlo[0] - x[:, 0:1]) / c, np.inf))
            ty = np.where(sn > 0, (Dhi[1] - x[:, 1:2]) / sn, np.where(sn < 0, (Dlo[1] - x[:, 1:2]) / sn, np.inf))
        rexit = np.minimum(tx, ty)
        inner = (wt * nf.lam(fx[k0:k0 + 2048, None] * rexit ** -s)).sum(axis=1) / s
        total += float(np.sum(W[k0:k0 + 2048] * inner))
    return 2.0 * total


# ---------------------------------------------------------------------------
# public modulars with two-resolution error estimates

def _ladder(compute, tol_abs: float, tol_rel: float, ladder=LADDER) -> QuadResult:
    """Evaluate on successively finer resolutions until consecutive values agree."""
    prev, err, panels = None, math.inf, 0
    for r in ladder:
        v, extra, panels = compute(r)
        if not math.isfinite(v):
            return QuadResult(math.inf, math.inf, panels, False)
        if prev is not None:
            err = abs(v - prev) + extra
            if err <= tol_abs + tol_rel * abs(v):
                return QuadResult(float(v), float(err), panels, True)
        prev = v
    return QuadResult(float(prev), float(err), panels, False)


def _is_zero(f: TestFunction, D: Domain) -> bool:
    if f.dim == 1:
        cores = core_components(as_intervals(D), f)
        if not cores:
            return True
    return f.sup_abs() == 0.0


def modular_LA(nf: NFunction, D: Domain, f: TestFunction, *, tol_abs: float = 0.0,
               tol_rel: float = TOL_LA) -> QuadResult:
    """``int_D A(|f|)`` by composite Gauss on the break points of ``f``."""
    if _is_zero(f, D):
        return QuadResult(0.0, 0.0, 0, True)

    def compute(r):
        rule = rule_LA(D, f, r, split=True)
        return evaluate(rule, nf, f), 0.0, rule.nodes // r.order
    return _ladder(compute, tol_abs, tol_rel)


def _shell_sums(rule: Rule, nf, f) -> list[np.ndarray]:
    """Per-side sums over the graded boundary shells, innermost remainder last."""
    labels, vals = [], []
    for t in rule.terms:
        m = t.shell >= 0
        labels.append(t.shell[m])
        vals.append(term_values(nf, t, f)[m])
    labels = np.concatenate(labels) if labels else np.empty(0, int)
    vals = np.concatenate(vals) if vals else np.empty(0)
    rows = []
    for side in (0, 1):
        m = labels % 2 == side
        if not np.any(m):
            continue
        k = labels[m] // 2
        rows.append(np.bincount(k, weights=vals[m], minlength=k.max() + 1))
    return rows


def modular_hardy(nf: NFunction, D: Domain, s: float, f: TestFunction, *, tol_abs: float = 0.0,
                  tol_rel: float | None = None) -> QuadResult:
    """``int_D A(|f(x)|/delta_x^s)`` with dyadic grading toward the boundary.

    When the sums over the graded boundary shells stop decaying over the
    last few shells, the integral is declared divergent (``inf``).
    """
    if tol_rel is None:
        tol_rel = TOL_1D if f.dim == 1 else TOL_2D
    if _is_zero(f, D):
        return QuadResult(0.0, 0.0, 0, True)

    def compute(r):
        rule = rule_hardy(D, s, f, r, split=True)
        with np.errstate(over="ignore", invalid="ignore"):
            v = evaluate(rule, nf, f)
            rows = _shell_sums(rule, nf, f)
        if not math.isfinite(v):
            return math.inf, math.inf, rule.nodes
        for row in rows:
            graded, rest = row[:-1], row[-1]
            last = graded[-DIVERGENCE_SHELLS - 1:]
            if last.size < 2 or not np.all(last > 0):
                continue
            ratios = last[1:] / last[:-1]
            if np.all(ratios >= 1.0 - 1e-9):
                return math.inf, math.inf, rule.nodes
            # replace the innermost remainder cell by the geometric continuation of the shells
            rho = ratios[-1]
            if rho < 1:
                v += last[-1] * rho / (1.0 - rho) - rest
        return v, 0.0, rule.nodes // r.order
    return _ladder(compute, tol_abs, tol_rel)


def modular_WsA(nf: NFunction, D: Domain, s: float, f: TestFunction, region: str = "DxD", *,
                tol_abs: float = 0.0, tol_rel: float | None = None, full_sum: bool = False) -> QuadResult:
    """``iint A(|f(x)-f(y)|/|x-y|^s) |x-y|^-N`` over ``D x D`` or ``R^N x R^N``."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if region not in ("DxD", "RNxRN"):
        raise ValueError("region must be 'DxD' or 'RNxRN'")
    if tol_rel is None:
        tol_rel = TOL_1D if f.dim == 1 else TOL_2D
    if _is_zero(f, D):
        return QuadResult(0.0, 0.0, 0, True)
    if f.dim == 1:
        def compute(r):
            rule = rule_WsA(D, s, f, region, r, full_sum=full_sum, split=True)
            return evaluate(rule, nf, f), 0.0, rule.nodes // r.order
        return _ladder(compute, tol_abs, tol_rel)

    box = _require_box(D)

    def compute2(r):
        v, bound, panels = _ws_box_dxd(nf, box, s, f, r)
        if region == "RNxRN":
            v += _ws_box_exterior(nf, box, s, f, r)
        return v, bound, panels
    return _ladder(compute2, tol_abs, tol_rel, LADDER_2D)


def polar_identity_check(nf: NFunction, D: Domain, s: float, f: TestFunction, n_angles: int = 256,
                         *, order: int = 8) -> tuple[QuadResult, QuadResult]:
    """Both sides of the line-section decomposition of ``2 iint_{DxD}``.

    ``lhs`` is twice the planar double integral.  ``rhs`` integrates, over
    ``n_angles`` midpoint directions in ``[0, pi)`` and over the offsets
    ``c`` of the lines ``{c w_perp + t w}``, the one-dimensional ``DxD``
    modular of ``t -> f(c w_perp + t w)`` on the line section, doubled to
    account for the opposite orientation.
    """
    box = _require_box(D)
    if f.sup_abs() == 0.0:
        z = QuadResult(0.0, 0.0, 0, True)
        return z, z
    m = modular_WsA(nf, box, s, f, "DxD")
    lhs = QuadResult(2 * m.value, 2 * m.abs_error_estimate, m.panels, m.converged)

    lo_s, hi_s = f.support_box()
    corners = [(a, b) for a in (box.lo[0], box.hi[0]) for b in (box.lo[1], box.hi[1])]
    corners += [(a, b) for a in (lo_s[0], hi_s[0]) for b in (lo_s[1], hi_s[1])]
    res = Resolution(order, 30)
    dth = math.pi / n_angles
    acc = []
    panels = 0
    for j in range(n_angles):
        th = (j + 0.5) * dth
        om = (math.cos(th), math.sin(th))
        perp = (-om[1], om[0])
        proj = np.unique([c[0] * perp[0] + c[1] * perp[1] for c in corners])
        cs, wc = composite_gauss(proj, order)
        inner = []
        for c, w in zip(cs, wc):
            base = (c * perp[0], c * perp[1])
            sec = box.line_section(base, om)
            if not sec.intervals:
                continue
            g = LineRestriction(f, base, om)
            rule = rule_WsA(sec.as_domain(), s, g, "DxD", res, split=True)
            inner.append(w * evaluate(rule, nf, g))
            panels += 1
        acc.append(math.fsum(inner))
    total = 2.0 * dth * math.fsum(acc)
    # the even-indexed directions form a midpoint rule of twice the spacing
    coarse = 4.0 * dth * math.fsum(acc[::2])
    err = abs(total - coarse)
    rhs = QuadResult(total, err, panels, err <= TOL_2D * abs(total))
    return lhs, rhs
