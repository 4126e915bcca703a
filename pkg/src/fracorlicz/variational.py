"""Upper bounds for the Hardy and Poincare quotients by minimizing over spline trials.

The ratio ``numerator / denominator`` is minimized over the coefficients of
a :class:`~fracorlicz.trial.SplineCombo` (and over an amplitude when the
gauge is not homogeneous).  The modular rules are assembled once per grid
and turned into sparse linear maps from coefficients to the sampled
differences, values or derivatives, so one objective evaluation is a few
sparse products.  Restart 0 starts from the minimizer of the quadratic
(``t^2``) surrogate, which for ``A = t^2`` is already the exact minimizer
over the spline space.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize, sparse

from .domain import Domain
from .modular import (Resolution, Terms, as_intervals, modular_LA, modular_WsA, modular_hardy,
                      rule_LA, rule_WsA, rule_hardy)
from .nfunction import NFunction
from .trial import Cutoff, CutoffError, SplineCombo

__all__ = [
    "Budget", "QuotientEstimate", "DegenerateTrial", "estimate_quotient", "quotient_of",
    "CutoffFamily", "SweepRow", "cutoff_sweep", "write_history_csv", "random_spline_trials",
]

KINDS = ("H", "P1", "P2")
RECOMPUTE_TOL = 1e-9


class DegenerateTrial(ValueError):
    """Every candidate trial collapsed to a zero denominator."""


@dataclass(frozen=True)
class Budget:
    grid_sizes: tuple[int, ...] = (32,)
    restarts: int = 8
    max_iters: int = 400
    amplitude_grid: int = 31
    amplitude_range: tuple[float, float] = (1e-3, 1e3)
    seed: int = 0
    resolution: Resolution = Resolution(8, 30)
    # knots cluster toward piece ends like xi^grading; 1.0 is uniform
    grading: float = 4.0

    @classmethod
    def from_spec(cls, spec: dict) -> "Budget":
        known = {"grid_sizes", "restarts", "max_iters", "amplitude_grid", "amplitude_range", "seed", "grading"}
        bad = set(spec) - known
        if bad:
            raise ValueError(f"unknown budget fields: {sorted(bad)}")
        kw = dict(spec)
        if "grid_sizes" in kw:
            kw["grid_sizes"] = tuple(int(g) for g in kw["grid_sizes"])
        if "amplitude_range" in kw:
            kw["amplitude_range"] = tuple(float(a) for a in kw["amplitude_range"])
        return cls(**kw)

    def to_spec(self) -> dict:
        return {"grid_sizes": list(self.grid_sizes), "restarts": self.restarts, "max_iters": self.max_iters,
                "amplitude_grid": self.amplitude_grid, "amplitude_range": list(self.amplitude_range),
                "seed": self.seed, "grading": self.grading}


@dataclass
class QuotientEstimate:
    kind: str
    value: float
    best_trial: SplineCombo
    history: list[tuple[int, float]]
    refinement_level: int
    numerator: float = math.nan
    denominator: float = math.nan
    grid: int = 0
    per_grid: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "numerator": self.numerator,
                "denominator": self.denominator, "grid": self.grid, "refinement_level": self.refinement_level,
                "per_grid": [list(p) for p in self.per_grid], "best_trial": self.best_trial.to_spec()}


def _check_kind(kind: str) -> str:
    k = kind.upper()
    if k not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return k


def quotient_of(kind: str, nf: NFunction, D: Domain, s: float, f, *, tol_rel: float = RECOMPUTE_TOL,
                full_sum: bool = False):
    """``(numerator, denominator)`` modulars of one trial, by adaptive quadrature."""
    kind = _check_kind(kind)
    region = "RNxRN" if kind == "P2" else "DxD"
    num = modular_WsA(nf, D, s, f, region, tol_rel=tol_rel, full_sum=full_sum)
    den = modular_hardy(nf, D, s, f, tol_rel=tol_rel) if kind == "H" else modular_LA(nf, D, f, tol_rel=tol_rel)
    return num, den


# ---------------------------------------------------------------------------
# compiled objective

class _Compiled:
    """Numerator and denominator of one spline family as sparse maps of the coefficients."""

    def __init__(self, kind: str, nf: NFunction, D: Domain, s: float, family: SplineCombo, res: Resolution):
        self.nf = nf
        region = "RNxRN" if kind == "P2" else "DxD"
        num = rule_WsA(D, s, family, region, res)
        den = rule_hardy(D, s, family, res) if kind == "H" else rule_LA(D, family, res)
        self.num = [self._compile(t, family) for t in num.terms]
        self.den = [self._compile(t, family) for t in den.terms]
        self.homogeneous = nf.homogeneous
        self.q = nf.q if nf.homogeneous else 2.0
        self.Kn = self._quadratic(self.num)
        self.Kd = self._quadratic(self.den)
        self.quadratic = nf.kind == "power" and nf.q == 2.0

    @staticmethod
    def _compile(t: Terms, family: SplineCombo):
        if t.kind == "diff":
            M = family.basis_matrix(t.y) - family.basis_matrix(t.x)
        elif t.kind == "value":
            M = family.basis_matrix(t.x)
        else:
            M = family.basis_matrix(t.x, deriv=1)
        M = sparse.csr_matrix(M)
        keep = np.diff(M.indptr) > 0
        return M[keep], t.w[keep], np.asarray(t.scale)[keep], t.phi

    @staticmethod
    def _quadratic(parts) -> np.ndarray:
        # the t^2 surrogate: A(z) = z^2, Lambda(z) = z^2 / 2
        n = parts[0][0].shape[1] if parts else 0
        K = np.zeros((n, n))
        for M, w, sc, phi in parts:
            coef = w * sc * sc * (1.0 if phi == "A" else 0.5)
            K += (M.T @ sparse.diags(coef) @ M).toarray()
        return 0.5 * (K + K.T)

    def _modular(self, parts, c) -> float:
        tot = 0.0
        for M, w, sc, phi in parts:
            z = sc * np.abs(M @ c)
            tot += float(np.dot(w, self.nf(z) if phi == "A" else self.nf.lam(z)))
        return tot

    def parts(self, c) -> tuple[float, float]:
        if self.quadratic:
            return float(c @ self.Kn @ c), float(c @ self.Kd @ c)
        return self._modular(self.num, c), self._modular(self.den, c)

    def ratio(self, c) -> float:
        n, d = self.parts(c)
        if not d > 0 or not math.isfinite(n):
            return math.inf
        return n / d


def _surrogate_start(comp: _Compiled) -> np.ndarray:
    Kd = comp.Kd + 1e-14 * np.trace(comp.Kd) / max(len(comp.Kd), 1) * np.eye(len(comp.Kd))
    _, vec = linalg.eigh(comp.Kn, Kd, subset_by_index=[0, 0])
    c = vec[:, 0]
    return c / np.max(np.abs(c))


def _best_amplitude(comp: _Compiled, c: np.ndarray, budget: Budget) -> tuple[float, float]:
    """Grid search over log-spaced amplitudes followed by a bounded scalar refinement."""
    lo, hi = budget.amplitude_range
    grid = np.logspace(math.log10(lo), math.log10(hi), budget.amplitude_grid)
    vals = np.array([comp.ratio(a * c) for a in grid])
    i = int(np.argmin(vals))
    a_lo = math.log(grid[max(i - 1, 0)])
    a_hi = math.log(grid[min(i + 1, grid.size - 1)])
    if a_hi > a_lo:
        r = optimize.minimize_scalar(lambda la: comp.ratio(math.exp(la) * c), bounds=(a_lo, a_hi),
                                     method="bounded", options={"xatol": 1e-6})
        if r.fun < vals[i]:
            return math.exp(r.x), float(r.fun)
    return float(grid[i]), float(vals[i])


def _normalize(c):
    m = np.max(np.abs(c))
    return c / m if m > 0 else c


def _optimize_grid(comp: _Compiled, n: int, starts: list[np.ndarray], budget: Budget, history, it0: int):
    """Multi-start Nelder-Mead; returns candidates ``(ratio, restart, coeffs)`` and the next iteration index."""
    rng = np.random.default_rng([budget.seed, n])
    homog = comp.homogeneous
    base = starts[0]
    seeds = list(starts)
    while len(seeds) < budget.restarts + len(starts) - 1:
        seeds.append(_normalize(base + 0.3 * rng.standard_normal(base.size)))
    cands = []
    it = it0
    best_so_far = math.inf
    for r, c0 in enumerate(seeds):
        c0 = _normalize(c0)
        if homog:
            x0 = c0

            def obj(x):
                return comp.ratio(_normalize(x))
        else:
            amp, _ = _best_amplitude(comp, c0, budget)
            x0 = np.concatenate([c0, [math.log(amp)]])

            def obj(x):
                return comp.ratio(math.exp(x[-1]) * _normalize(x[:-1]))
        f0 = obj(x0)
        if math.isfinite(f0):
            best_so_far = min(best_so_far, f0)
            history.append((it, best_so_far))
        it += 1
        if budget.max_iters > 0 and math.isfinite(f0):
            counter = {"k": 0}

            def cb(xk):
                nonlocal it, best_so_far
                counter["k"] += 1
                v = obj(xk)
                it += 1
                if v < best_so_far:
                    best_so_far = v
                history.append((it, best_so_far))

            res = optimize.minimize(obj, x0, method="Nelder-Mead", callback=cb,
                                    options={"maxiter": budget.max_iters, "xatol": 1e-9, "fatol": 1e-12 * abs(f0),
                                             "adaptive": True})
            x, fx = (res.x, res.fun) if res.fun < f0 else (x0, f0)
        else:
            x, fx = x0, f0
        if homog:
            coeffs = _normalize(x)
        else:
            coeffs = math.exp(x[-1]) * _normalize(x[:-1])
        cands.append((fx, r, coeffs))
    return cands, it


def estimate_quotient(kind: str, nf: NFunction, D: Domain, s: float, budget: Budget = Budget(), *,
                      warm_start: SplineCombo | None = None) -> QuotientEstimate:
    """Smallest quotient found over spline trials on each grid of ``budget.grid_sizes``.

    Grids are processed in order; the best trial of one grid is embedded
    exactly (knot halving) into the next when the sizes double, and that
    embedded trial is always one of the candidates, so estimates do not
    increase along a doubling sequence.  ``value`` is recomputed from the
    winning trial's modulars by adaptive quadrature.
    """
    kind = _check_kind(kind)
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    DI = as_intervals(D)
    if kind in ("H", "P1") and not DI.bounded:
        raise ValueError(f"{kind} estimates need a bounded domain")
    history: list[tuple[int, float]] = []
    per_grid = []
    prev: QuotientEstimate | None = None
    carry = warm_start
    it = 0
    for level, n in enumerate(budget.grid_sizes):
        if n < 4:
            # cubic splines vanishing to second order at both ends need 4 cells for one coefficient
            raise DegenerateTrial(f"grid {n} admits only the zero trial")
        family = SplineCombo.on(DI, n, grading=budget.grading)
        comp = _Compiled(kind, nf, DI, s, family, budget.resolution)
        starts = [_surrogate_start(comp)]
        embedded = None
        if carry is not None:
            emb = carry
            while emb.pieces[0].cells < n:
                emb = emb.refined()
            if emb.nbasis == family.nbasis and all(p.cells == n and p.grading == budget.grading
                                                   for p in emb.pieces):
                embedded = emb
                starts.append(_normalize(emb.coeffs))
        cands, it = _optimize_grid(comp, n, starts, budget, history, it)
        cands = [c for c in cands if math.isfinite(c[0])]
        if not cands:
            raise DegenerateTrial("every restart produced a zero denominator")
        cands.sort(key=lambda c: (c[0], c[1]))
        scored = []
        trial = family.with_coeffs(cands[0][2])
        num, den = quotient_of(kind, nf, DI, s, trial)
        if den.value > 0 and math.isfinite(num.value):
            scored.append((num.value / den.value, 0, trial, num.value, den.value))
        if embedded is not None and prev is not None and prev.best_trial is carry:
            # same function as the previous winner, so its modulars carry over unchanged
            scored.append((prev.value, 1, embedded, prev.numerator, prev.denominator))
        elif embedded is not None:
            num, den = quotient_of(kind, nf, DI, s, embedded)
            if den.value > 0 and math.isfinite(num.value):
                scored.append((num.value / den.value, 1, embedded, num.value, den.value))
        if not scored:
            raise DegenerateTrial("best trial has a zero denominator")
        scored.sort(key=lambda t: (t[0], t[1]))
        val, _, trial, nv, dv = scored[0]
        per_grid.append((n, val))
        prev = QuotientEstimate(kind, val, trial, list(history), level, nv, dv, n, list(per_grid))
        carry = trial
    return prev


def write_history_csv(est: QuotientEstimate, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "value"])
        for i, v in est.history:
            w.writerow([i, repr(float(v))])


def random_spline_trials(D: Domain, n: int, cells: int = 16, seed: int = 0) -> list[SplineCombo]:
    """``n`` seeded random spline trials on the pieces of ``D``."""
    rng = np.random.default_rng(seed)
    fam = SplineCombo.on(as_intervals(D), cells)
    out = []
    for _ in range(n):
        c = rng.standard_normal(fam.nbasis) * 10.0 ** rng.uniform(-2, 2)
        out.append(fam.with_coeffs(c))
    return out


# ---------------------------------------------------------------------------
# cutoff sweep

@dataclass(frozen=True)
class CutoffFamily:
    eps: tuple[float, ...]

    def __post_init__(self):
        e = tuple(float(v) for v in self.eps)
        if any(b >= a for a, b in zip(e, e[1:])):
            raise ValueError("eps must be strictly decreasing")
        if any(v <= 0 for v in e):
            raise ValueError("eps must be positive")
        object.__setattr__(self, "eps", e)

    @classmethod
    def dyadic(cls, k_min: int, k_max: int) -> "CutoffFamily":
        return cls(tuple(2.0 ** -k for k in range(k_min, k_max + 1)))

    def members(self, D: Domain) -> list[Cutoff]:
        return [Cutoff(D, e) for e in self.eps]


@dataclass(frozen=True)
class SweepRow:
    eps: float
    hardy_quotient: float
    poincare_quotient: float
    divergent: bool
    numerator: float
    hardy_denominator: float
    la_denominator: float


def _sweep_point(nf: NFunction, D: Domain, s: float, f: Cutoff) -> SweepRow:
    num = modular_WsA(nf, D, s, f, "DxD").value
    hd = modular_hardy(nf, D, s, f)
    la = modular_LA(nf, D, f).value
    divergent = hd.divergent
    hq = 0.0 if divergent else num / hd.value
    return SweepRow(f.eps, hq, num / la, divergent, num, hd.value, la)


def cutoff_sweep(nf: NFunction, D: Domain, s: float, family: CutoffFamily, *, workers: int = 1) -> list[SweepRow]:
    """Hardy and regional Poincare quotients of the cutoffs ``f_eps``.

    Points are independent; with ``workers > 1`` they run on a thread pool
    and come back in the order of ``family.eps``.
    """
    members = family.members(D)
    if workers <= 1:
        return [_sweep_point(nf, D, s, f) for f in members]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda f: _sweep_point(nf, D, s, f), members))


__all__ += ["CutoffError"]
