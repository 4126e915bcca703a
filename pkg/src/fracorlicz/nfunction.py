"""N-functions (Young functions) and the scalar gauges built on them.

An N-function ``A`` is convex on ``[0, inf)`` with ``A(t)/t -> 0`` at the
origin and ``A(t)/t -> inf`` at infinity.  The catalog covers

* ``power``            ``t**q``
* ``power_log_plus``   ``t**q * (1 + |log t|)``
* ``power_log_minus``  ``t**q / log(e + t)``
* ``llogl``            ``(1 + t) log(1 + t) - t``
* ``sampled``          a user table, interpolated monotonically and convexly

Gauges (doubling constant, growth exponent, alpha, beta) are estimated
numerically on a log grid; catalog entries additionally expose their exact
asymptotics so that limit questions can be answered analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy import special

from .quadrature import QuadratureError, adaptive_gk, gauss_legendre

__all__ = [
    "NFunction", "InvalidNFunction", "NotDelta2Error", "LimitVerdict", "BetaLimit",
    "power", "power_log_plus", "power_log_minus", "llogl", "sampled", "from_spec", "parse_nfunction",
    "doubling_constant", "growth_exponent", "alpha", "alpha_limit_evidence", "alpha_asymptotics",
    "beta_limit", "lam_numeric", "log_grid", "grid_sup",
]

KINDS = ("power", "power_log_plus", "power_log_minus", "llogl", "sampled")

T_MIN, T_MAX, N_GRID = 1e-12, 1e12, 2048
DIVERGENCE_THRESHOLD = 1e12

# LimitVerdict thresholds
N_PROBES = 60
TAIL = 5
ZERO_THRESHOLD = 1e-6
INF_THRESHOLD = 1e6
SPREAD_THRESHOLD = 1e-3


class InvalidNFunction(ValueError):
    pass


class NotDelta2Error(ValueError):
    pass


def _llogl(t):
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = t < 0.05
    ts = t[small]
    # alternating series sum_{k>=2} (-1)^k t^k / (k(k-1)); direct formula cancels near 0
    acc = np.zeros_like(ts)
    for k in range(16, 1, -1):
        acc = (-1) ** k / (k * (k - 1)) + ts * acc
    out[small] = ts * ts * acc
    tl = t[~small]
    out[~small] = (1.0 + tl) * np.log1p(tl) - tl
    return out


def _llogl_lam(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 0.05
    zs = z[small]
    acc = np.zeros_like(zs)
    for k in range(16, 1, -1):
        acc = (-1) ** k / (k * k * (k - 1)) + zs * acc
    out[small] = zs * zs * acc
    zl = z[~small]
    # int_0^z A(t)/t dt = -Li2(-z) + (1+z)log(1+z) - 2z, with Li2(-z) = spence(1+z)
    out[~small] = -special.spence(1.0 + zl) + (1.0 + zl) * np.log1p(zl) - 2.0 * zl
    return out


@dataclass(frozen=True, eq=False)
class NFunction:
    """An Orlicz gauge ``A`` with right-derivative ``a``.

    Instances are built through the catalog constructors (:func:`power`,
    :func:`llogl`, ...) or :func:`from_spec`.  ``A`` and ``a`` accept scalars
    or arrays; ``lam(z)`` is ``int_0^z A(t)/t dt``.
    """

    kind: str
    q: float | None = None
    samples: tuple[tuple[float, float], ...] | None = None
    _tab: tuple = field(default=(), repr=False)

    # ---- evaluation -------------------------------------------------
    def __call__(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self.kind == "power":
                return t ** self.q
            if self.kind == "power_log_plus":
                return t ** self.q * (1.0 + np.abs(np.log(np.where(t > 0, t, 1.0))))
            if self.kind == "power_log_minus":
                return t ** self.q / np.log(np.e + t)
            if self.kind == "llogl":
                return _llogl(t)
            return self._sampled_eval(t)

    def deriv(self, t):
        """Right-derivative ``a(t)``."""
        t = np.abs(np.asarray(t, dtype=float))
        q = self.q
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self.kind == "power":
                return q * t ** (q - 1.0)
            if self.kind == "power_log_plus":
                lt = np.log(np.where(t > 0, t, 1.0))
                tq1 = t ** (q - 1.0)
                return np.where(t < 1.0, tq1 * (q * (1.0 - lt) - 1.0), tq1 * (q * (1.0 + lt) + 1.0))
            if self.kind == "power_log_minus":
                lg = np.log(np.e + t)
                return q * t ** (q - 1.0) / lg - t ** q / ((np.e + t) * lg * lg)
            if self.kind == "llogl":
                return np.log1p(t)
            return self._sampled_deriv(t)

    def lam(self, z):
        """``Lambda(z) = int_0^z A(t)/t dt`` (closed form where the catalog allows)."""
        z = np.abs(np.asarray(z, dtype=float))
        q = self.q
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self.kind == "power":
                return z ** q / q
            if self.kind == "power_log_plus":
                lz = np.log(np.where(z > 0, z, 1.0))
                zq = z ** q
                below = zq / q * (1.0 - lz) + zq / q ** 2
                above = (1.0 / q + 1.0 / q ** 2) + (zq - 1.0) / q + zq * lz / q - (zq - 1.0) / q ** 2
                return np.where(z <= 1.0, below, above)
            if self.kind == "llogl":
                return _llogl_lam(z)
        if z.size > 16:
            return lam_cumulative(self, z)
        return lam_numeric(self, z)

    # ---- sampled gauges ----------------------------------------------
    def _sampled_eval(self, t):
        ts, As, slopes, p0, pn = self._tab
        out = np.interp(t, ts, As)
        lo = t < ts[0]
        hi = t > ts[-1]
        out = np.where(lo, As[0] * (t / ts[0]) ** p0, out)
        out = np.where(hi, As[-1] * (t / ts[-1]) ** pn, out)
        return out

    def _sampled_deriv(self, t):
        ts, As, slopes, p0, pn = self._tab
        idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(slopes) - 1)
        out = slopes[idx]
        out = np.where(t < ts[0], p0 * As[0] / ts[0] * (t / ts[0]) ** (p0 - 1.0), out)
        out = np.where(t >= ts[-1], pn * As[-1] / ts[-1] * (t / ts[-1]) ** (pn - 1.0), out)
        return out

    # ---- metadata ----------------------------------------------------
    @property
    def is_catalog(self) -> bool:
        return self.kind != "sampled"

    @property
    def homogeneous(self) -> bool:
        """True when ``A(ct) = c**q A(t)``; quotients are then scale free."""
        return self.kind == "power"

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where ``a`` may jump."""
        if self.kind == "power_log_plus":
            return (1.0,)
        if self.kind == "sampled":
            return tuple(float(t) for t in self._tab[0])
        return ()

    def to_spec(self) -> dict:
        if self.kind == "sampled":
            return {"kind": "sampled", "samples": [list(p) for p in self.samples]}
        if self.kind == "llogl":
            return {"kind": "llogl"}
        return {"kind": self.kind, "q": self.q}

    def label(self) -> str:
        if self.kind == "llogl":
            return "(1+t)log(1+t)-t"
        if self.kind == "sampled":
            return f"sampled[{len(self.samples or ())}]"
        fmt = {"power": "t^{q}", "power_log_plus": "t^{q}(1+|log t|)", "power_log_minus": "t^{q}/log(e+t)"}
        return fmt[self.kind].format(q=f"{self.q:g}")

    def __repr__(self) -> str:
        return f"NFunction({self.label()})"


def _check_q(q):
    q = float(q)
    if not (q > 1.0 and math.isfinite(q)):
        raise InvalidNFunction(f"power-type N-functions need q > 1, got {q}")
    return q


def power(q: float) -> NFunction:
    return NFunction("power", _check_q(q))


def power_log_plus(q: float) -> NFunction:
    return NFunction("power_log_plus", _check_q(q))


def power_log_minus(q: float) -> NFunction:
    return NFunction("power_log_minus", _check_q(q))


def llogl() -> NFunction:
    return NFunction("llogl")


def sampled(samples: Sequence[Sequence[float]]) -> NFunction:
    """Tabulated gauge.

    Linear interpolation between samples, ``A_0 (t/t_0)**p0`` below the
    first sample and ``A_n (t/t_n)**pn`` above the last one, with the two
    exponents chosen to match the end slopes.  Tables that are not
    positive, increasing, convex, or whose ``A(t)/t`` is not increasing
    are rejected.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise InvalidNFunction("samples must be a list of at least two [t, A(t)] pairs")
    if not np.all(np.isfinite(pts)):
        raise InvalidNFunction("samples must be finite")
    ts, As = pts[:, 0], pts[:, 1]
    if ts[0] <= 0 or np.any(np.diff(ts) <= 0):
        raise InvalidNFunction("sample abscissae must be positive and strictly increasing")
    if np.any(As <= 0) or np.any(np.diff(As) <= 0):
        raise InvalidNFunction("sampled A must be positive and strictly increasing")
    if np.any(np.diff(As / ts) <= 0):
        raise InvalidNFunction("sampled A(t)/t must be strictly increasing")
    slopes = np.diff(As) / np.diff(ts)
    if np.any(np.diff(slopes) < -1e-12 * np.abs(slopes[1:])):
        raise InvalidNFunction("sampled A fails the convexity check")
    p0 = ts[0] * slopes[0] / As[0]
    pn = ts[-1] * slopes[-1] / As[-1]
    tab = (ts, As, slopes, p0, pn)
    return NFunction("sampled", None, tuple(map(tuple, pts.tolist())), tab)


def from_spec(spec: dict) -> NFunction:
    """Build an N-function from its JSON form (``{"kind": ..., "q": ...}``)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidNFunction("nfunction spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind not in KINDS:
        raise InvalidNFunction(f"unknown nfunction kind {kind!r}; expected one of {KINDS}")
    if kind == "llogl":
        return llogl()
    if kind == "sampled":
        if "samples" not in spec:
            raise InvalidNFunction("sampled nfunction needs 'samples'")
        return sampled(spec["samples"])
    if "q" not in spec:
        raise InvalidNFunction(f"{kind} nfunction needs 'q'")
    return {"power": power, "power_log_plus": power_log_plus, "power_log_minus": power_log_minus}[kind](spec["q"])


def parse_nfunction(text: str) -> NFunction:
    """Parse the compact CLI form ``power:q=2`` / ``llogl`` / ``power_log_plus:q=3``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().replace("-", "_")
    spec: dict = {"kind": kind}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidNFunction(f"cannot parse nfunction parameter {item!r}")
        try:
            spec[key.strip()] = float(val)
        except ValueError as exc:
            raise InvalidNFunction(f"parameter {key!r} is not a number: {val!r}") from exc
    return from_spec(spec)


# ---------------------------------------------------------------------------
# sup-type gauges

def log_grid(extra=()) -> np.ndarray:
    t = np.logspace(math.log10(T_MIN), math.log10(T_MAX), N_GRID)
    if len(extra):
        t = np.union1d(t, [e for e in extra if T_MIN <= e <= T_MAX])
    return t


def _golden_max(fun, lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    """Golden-section search for the max of ``fun`` over ``[lo, hi]`` (log-t units)."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fun(d)
        if b - a < 1e-14 * max(1.0, abs(a)):
            break
    return (c, fc) if fc >= fd else (d, fd)


def grid_sup(ratio, extra=(), shifts=()) -> float:
    """sup over ``t > 0`` of a vectorized ``ratio(t)``: log grid + golden refinement.

    Each factor in ``shifts`` adds a copy of the base grid multiplied by it.
    """
    t = log_grid(extra)
    if len(shifts):
        t = np.union1d(t, np.concatenate([log_grid() * f for f in shifts]))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        r = np.asarray(ratio(t), dtype=float)
    if np.any(np.isnan(r)):
        raise InvalidNFunction("gauge ratio is undefined at a probe point")
    if np.any(np.isinf(r)):
        return math.inf
    i = int(np.argmax(r))
    best = float(r[i])
    lt = np.log(t)
    lo, hi = lt[max(i - 1, 0)], lt[min(i + 1, len(t) - 1)]
    if hi > lo:
        def fun(u):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                v = float(np.asarray(ratio(np.array([math.exp(u)])))[0])
            return v if math.isfinite(v) else -math.inf
        _, val = _golden_max(fun, lo, hi)
        best = max(best, val)
    return best


def _checked_eval(nf: NFunction, t):
    vals = nf(t)
    if not np.all(np.isfinite(vals)):
        raise InvalidNFunction(f"{nf!r} is not finite on the probe grid")
    return vals


def doubling_constant(nf: NFunction) -> float:
    """sup_t A(2t)/A(t); ``math.inf`` when the running sup passes the divergence threshold."""
    t = log_grid(nf.breakpoints + tuple(b / 2 for b in nf.breakpoints))
    _checked_eval(nf, t)
    _checked_eval(nf, 2.0 * t)
    c2 = grid_sup(lambda x: nf(2.0 * x) / nf(x), nf.breakpoints)
    return math.inf if c2 > DIVERGENCE_THRESHOLD else c2


def growth_exponent(nf: NFunction) -> float:
    """p = sup_t t a(t) / A(t), the exponent in ``A(lt) <= l**p A(t)`` for ``l >= 1``."""
    if not math.isfinite(doubling_constant(nf)):
        raise NotDelta2Error(f"{nf!r} does not satisfy the doubling condition")
    p = grid_sup(lambda x: x * nf.deriv(x) / nf(x), nf.breakpoints)
    if not math.isfinite(p) or p > DIVERGENCE_THRESHOLD:
        raise NotDelta2Error(f"growth exponent of {nf!r} diverges")
    return p


def alpha(nf: NFunction, s: float, lam: float, *, follow_lam: bool = False) -> float:
    """sup_{t>0} A(lam t) / (lam**(1/s) A(t)); t = 0 is excluded (0/0).

    The sup is taken over the fixed grid ``[T_MIN, T_MAX]``.  ``follow_lam``
    adds a copy of the grid scaled by ``1/lam`` so that the region where
    ``lam * t`` is of order one is also searched (used by the limit probes,
    where ``lam`` runs far outside the grid).
    """
    if not lam > 0:
        raise ValueError("alpha needs lambda > 0")
    lam = float(lam)
    scale = lam ** (1.0 / s) if lam ** (1.0 / s) > 0 else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        # evaluate in logs: the scale itself under/overflows
        def ratio(t):
            return np.exp(np.log(nf(lam * t)) - np.log(nf(t)) - math.log(lam) / s)
    else:
        def ratio(t):
            return nf(lam * t) / nf(t) / scale
    extra = nf.breakpoints + tuple(b / lam for b in nf.breakpoints)
    return grid_sup(ratio, extra, shifts=(1.0 / lam,) if follow_lam and lam != 1.0 else ())


# ---------------------------------------------------------------------------
# limit evidence

Direction = Literal["to-zero-plus", "to-infinity"]


@dataclass(frozen=True)
class LimitVerdict:
    """Numerical evidence about a limit of ``lam**w * alpha(lam)``.

    ``classification`` is one of ``evidence-zero``, ``evidence-positive``,
    ``evidence-infinite`` or ``inconclusive``; ``value`` is set for the
    positive case.  ``analytic`` marks verdicts decided from a catalog
    closed form rather than from the probes.
    """

    direction: str
    classification: str
    probes: tuple[tuple[float, float], ...]
    value: float | None = None
    analytic: bool = False

    @property
    def is_zero(self) -> bool:
        return self.classification == "evidence-zero"


def classify_probes(values: Sequence[float]) -> tuple[str, float | None]:
    v = np.asarray(values, dtype=float)[-TAIL:]
    if len(v) < TAIL:
        return "inconclusive", None
    final = v[-1]
    if np.all(np.diff(v) < 0) and final < ZERO_THRESHOLD:
        return "evidence-zero", None
    if np.all(np.diff(v) > 0) and final > INF_THRESHOLD:
        return "evidence-infinite", None
    if np.all(np.isfinite(v)) and final > 0 and (v.max() - v.min()) / final < SPREAD_THRESHOLD:
        return "evidence-positive", float(final)
    return "inconclusive", None


def alpha_asymptotics(nf: NFunction, s: float, direction: Direction):
    """Exact asymptotic form of alpha for catalog gauges.

    Returns ``(e, k, c)`` with ``alpha(lam) ~ c * lam**e * |log lam|**k`` along
    ``direction``, or ``None`` when no closed form is known.  Derivations:
    ``t**q`` is homogeneous; for ``t**q(1+|log t|)`` the sup sits at ``t = 1``;
    ``t**q/log(e+t)`` has a log-sized bump for small ``lam`` and ratio limit 1
    for large ``lam``; for ``(1+t)log(1+t)-t`` the elasticity ``t a/A``
    decreases from 2 to 1, so the sup is a limit at ``t -> inf`` (small
    ``lam``) or ``t -> 0`` (large ``lam``).
    """
    if nf.kind == "sampled":
        return None
    inv_s = 1.0 / s
    small = direction == "to-zero-plus"
    if nf.kind == "power":
        return nf.q - inv_s, 0, 1.0
    if nf.kind == "power_log_plus":
        return nf.q - inv_s, 1, 1.0
    if nf.kind == "power_log_minus":
        return (nf.q - inv_s, 1, None) if small else (nf.q - inv_s, 0, 1.0)
    if nf.kind == "llogl":
        return (1.0 - inv_s, 0, 1.0) if small else (2.0 - inv_s, 0, 1.0)
    return None


_EXP_EPS = 1e-12


def _analytic_limit(e: float, k: int, c: float | None, direction: Direction):
    toward_zero = direction == "to-zero-plus"
    if abs(e) > _EXP_EPS:
        decays = (e > 0) if toward_zero else (e < 0)
        return ("evidence-zero", None) if decays else ("evidence-infinite", None)
    if k > 0:
        return "evidence-infinite", None
    if k < 0:
        return "evidence-zero", None
    return "evidence-positive", c


def alpha_limit_evidence(nf: NFunction, s: float, direction: Direction = "to-zero-plus",
                         weight_exponent: float = 0.0, *, analytic: bool = True,
                         n_probes: int = N_PROBES, probe: bool = True) -> LimitVerdict:
    """Probe ``lam**w * alpha(lam)`` along ``lam_k = 2**(-+k)`` and classify the limit.

    With ``probe=False`` a catalog closed form is returned without sampling.
    """
    if direction not in ("to-zero-plus", "to-infinity"):
        raise ValueError(f"bad direction {direction!r}")
    if analytic and not probe:
        form = alpha_asymptotics(nf, s, direction)
        if form is not None:
            cls, val = _analytic_limit(form[0] + weight_exponent, form[1], form[2], direction)
            return LimitVerdict(direction, cls, (), val, analytic=True)
    sign = -1.0 if direction == "to-zero-plus" else 1.0
    probes = []
    for k in range(1, n_probes + 1):
        lam = 2.0 ** (sign * k)
        try:
            a = alpha(nf, s, lam, follow_lam=True)
        except InvalidNFunction:
            a = math.inf
        with np.errstate(over="ignore", invalid="ignore"):
            val = float(np.float64(lam) ** weight_exponent * a) if a > 0 else 0.0
        probes.append((lam, val))
    probes_t = tuple(probes)
    if analytic:
        form = alpha_asymptotics(nf, s, direction)
        if form is not None:
            e, k, c = form
            cls, val = _analytic_limit(e + weight_exponent, k, c, direction)
            return LimitVerdict(direction, cls, probes_t, val, analytic=True)
    cls, val = classify_probes([p[1] for p in probes])
    return LimitVerdict(direction, cls, probes_t, val, analytic=False)


# ---------------------------------------------------------------------------
# beta

def lam_numeric(nf: NFunction, z, tol_rel: float = 1e-11):
    """``int_0^z A(t)/t dt`` by adaptive quadrature in ``u = log t``.

    The piece below ``u0 = log z - 80`` is bounded by ``A(e**u0)`` (since
    ``A(t)/t`` increases) and is ignored.
    """
    z0 = np.abs(np.asarray(z, dtype=float))
    z = np.atleast_1d(z0).ravel()
    out = np.empty_like(z)
    for i, zi in enumerate(z):
        if zi == 0:
            out[i] = 0.0
            continue
        top = math.log(zi)
        res = adaptive_gk(lambda u: nf(np.exp(u)), top - 80.0, top, tol_rel=tol_rel,
                          breakpoints=[math.log(b) for b in nf.breakpoints if 0 < b < zi])
        if not res.converged or not math.isfinite(res.value):
            raise QuadratureError(f"inner integral for Lambda({zi:g}) did not converge")
        out[i] = res.value
    return out.reshape(z0.shape)


def lam_cumulative(nf: NFunction, z, panel: float = 0.25, order: int = 10):
    """Vectorized ``Lambda`` for many arguments at once.

    Sorts the distinct arguments, integrates ``A(e**u)`` between neighbours
    in ``u = log t`` with fixed Gauss panels no wider than ``panel`` and
    accumulates; only the smallest argument goes through :func:`lam_numeric`.
    Sample abscissae of tabulated gauges are inserted so no panel straddles a kink.
    """
    z0 = np.abs(np.asarray(z, dtype=float))
    flat = z0.ravel()
    pos = flat[(flat > 0) & np.isfinite(flat)]
    out = np.where(np.isinf(flat), math.inf, 0.0)
    if pos.size == 0:
        return out.reshape(z0.shape)
    knots = [b for b in nf.breakpoints if pos.min() < b < pos.max()]
    zs = np.unique(np.concatenate([pos, knots]))
    u = np.log(zs)
    du = np.diff(u)
    m = np.maximum(np.ceil(du / panel).astype(np.int64), 1)
    gap = np.repeat(np.arange(du.size), m)
    sub = np.arange(m.sum()) - np.repeat(np.cumsum(m) - m, m)
    width = du[gap] / m[gap]
    left = u[gap] + sub * width
    x0, w0 = gauss_legendre(order)
    vals = nf(np.exp(left[:, None] + width[:, None] * x0[None, :])) @ w0 * width
    inc = np.bincount(gap, weights=vals, minlength=du.size)
    table = float(lam_numeric(nf, zs[0])) + np.concatenate([[0.0], np.cumsum(inc)])
    idx = np.searchsorted(zs, flat[(flat > 0) & np.isfinite(flat)])
    out[(flat > 0) & np.isfinite(flat)] = table[idx]
    return out.reshape(z0.shape)


@dataclass(frozen=True)
class BetaLimit:
    """Limit of ``g(eps) = eps * int_0^{eps**-s} A(z)/z dz`` as ``eps -> 0+``.

    ``value`` is the reported limit (analytic for catalog gauges, otherwise
    the probe extrapolation); ``numeric`` is always the probe-based figure.
    """

    value: float
    numeric: float
    classification: str
    probes: tuple[tuple[float, float], ...]
    analytic: bool

    @property
    def final_probe(self) -> float:
        return self.probes[-1][1] if self.probes else math.nan


def _beta_analytic(nf: NFunction, s: float) -> float | None:
    if nf.kind == "llogl":
        return 0.0
    if nf.kind == "sampled":
        return None
    e = 1.0 - s * nf.q
    if nf.kind == "power":
        if abs(e) <= _EXP_EPS:
            return 1.0 / nf.q
        return 0.0 if e > 0 else math.inf
    if nf.kind == "power_log_plus":
        # Lambda(z) ~ z^q log z / q, extra log factor pushes the boundary case to inf
        return 0.0 if e > _EXP_EPS else math.inf
    if nf.kind == "power_log_minus":
        # Lambda(z) ~ z^q / (q log z), the log in the denominator pulls the boundary case to 0
        return 0.0 if e > -_EXP_EPS else math.inf
    return None


def _aitken(g: np.ndarray) -> float:
    g0, g1, g2 = g[-3:]
    den = g2 - 2.0 * g1 + g0
    if den == 0 or not math.isfinite(den):
        return float(g2)
    return float(g2 - (g2 - g1) ** 2 / den)


def beta_limit(nf: NFunction, s: float, *, n_probes: int = N_PROBES, analytic: bool = True,
               probe: bool = True) -> BetaLimit:
    """Evaluate ``g(eps)`` on ``eps_k = 2**-k`` and report its limit.

    The inner integral is always computed numerically (:func:`lam_numeric`),
    so the probes are an independent check on the catalog closed form.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if analytic and not probe:
        exact = _beta_analytic(nf, s)
        if exact is not None:
            cls = "evidence-zero" if exact == 0 else "evidence-infinite" if math.isinf(exact) else "evidence-positive"
            return BetaLimit(exact, math.nan, cls, (), True)
    probes = []
    for k in range(1, n_probes + 1):
        eps = 2.0 ** (-k)
        try:
            inner = float(lam_numeric(nf, eps ** (-s)))
        except QuadratureError as exc:
            raise QuadratureError(f"beta probe failed at eps={eps:g}: {exc}") from exc
        probes.append((eps, eps * inner))
    g = np.array([p[1] for p in probes])
    cls, val = classify_probes(g)
    if cls == "evidence-zero":
        numeric = 0.0
    elif cls == "evidence-infinite":
        numeric = math.inf
    elif cls == "evidence-positive":
        numeric = val
    else:
        numeric = _aitken(g)
        if abs(numeric) < ZERO_THRESHOLD:
            cls = "evidence-zero"
    exact = _beta_analytic(nf, s) if analytic else None
    if exact is not None:
        return BetaLimit(exact, numeric, cls, tuple(probes), True)
    return BetaLimit(numeric, numeric, cls, tuple(probes), False)
