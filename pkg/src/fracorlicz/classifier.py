"""Rule engine: verdicts for the Hardy (FOHI), regional Poincare (RFOPI) and
Poincare (FOPI) inequalities from gauge values and the domain class.

Each rule lists its hypotheses; a rule fires when all of them evaluate true.
Rules are tried in precedence order (beta test, alpha limits, geometry,
then the ``P2 >= P1`` implication).  The first firing rule decides an
inequality and every later rule is still evaluated so that disagreement
surfaces as :class:`ContradictionError`.

Catalog gauges are decided from closed forms and give ``theorem`` grade
verdicts.  Tabulated gauges, and geometric facts obtained by sampling a
concrete domain, give ``evidence`` grade verdicts.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import domain as dom
from .nfunction import (NFunction, alpha_limit_evidence, beta_limit, doubling_constant, growth_exponent,
                        llogl, power, power_log_minus, power_log_plus)

__all__ = [
    "Hypothesis", "Verdict", "DomainClass", "ContradictionError", "classify", "table1", "Table1Report",
    "ls_check", "LSReport", "INEQUALITIES", "DOMAIN_TAGS", "TABLE1_GOLDEN",
]

INEQUALITIES = ("FOHI", "RFOPI", "FOPI")
STATUSES = ("holds", "fails", "unknown")
DOMAIN_TAGS = ("BoundedLipschitz", "PuncturedSpace", "AboveLipschitzGraph", "ComplementBoundedLipschitz",
               "OpenSetWithSections", "General1D")
_CLI_TAGS = {"bounded-lipschitz": "BoundedLipschitz", "punctured-space": "PuncturedSpace",
             "above-lipschitz-graph": "AboveLipschitzGraph",
             "complement-bounded-lipschitz": "ComplementBoundedLipschitz",
             "open-set-with-sections": "OpenSetWithSections", "general-1d": "General1D"}

# directions sampled for section gauges of a concrete domain
SECTION_ANGLES = 16
SECTION_BASES = 4


class ContradictionError(RuntimeError):
    """Two fired rules disagree; indicates a gauge bug."""


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


@dataclass(frozen=True)
class Hypothesis:
    name: str
    value: object
    holds: bool
    analytic: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _jsonable(self.value), "holds": self.holds,
                "analytic": self.analytic}


@dataclass(frozen=True)
class Verdict:
    inequality: str
    status: str
    rule: str
    grade: str
    evidence: tuple[Hypothesis, ...] = ()

    def __post_init__(self):
        if self.inequality not in INEQUALITIES:
            raise ValueError(f"unknown inequality {self.inequality!r}")
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status != "unknown" and not self.rule:
            raise ValueError("a decided verdict needs a rule tag")

    def reproduces(self) -> bool:
        """Re-check the recorded hypotheses: a decided verdict needs every one of them true."""
        if self.status == "unknown":
            return True
        return bool(self.rule) and bool(self.evidence) and all(h.holds for h in self.evidence)

    def to_dict(self) -> dict:
        return {"inequality": self.inequality, "status": self.status, "rule": self.rule, "grade": self.grade,
                "evidence": [h.to_dict() for h in self.evidence]}


@dataclass(frozen=True)
class DomainClass:
    """Geometric class of the domain, optionally with known gauges.

    ``sigma`` is an angle range ``(theta0, theta1)`` of directions
    ``(cos t, sin t)`` used for line sections; ``section_bc`` the sup of
    ``BC`` over those sections; ``exterior`` a pair ``(R, c1)`` with
    ``|B(x, R) \\ D| > c1`` for all ``x in D``; ``ls`` a known LS flag.
    Unset fields are computed from an attached domain when possible.
    """

    tag: str
    dim: int = 1
    bc: float | None = None
    sigma: tuple[float, float] | None = None
    section_bc: float | None = None
    exterior: tuple[float, float] | None = None
    ls: bool | None = None

    def __post_init__(self):
        if self.tag not in DOMAIN_TAGS:
            raise ValueError(f"unknown domain class {self.tag!r}; expected one of {DOMAIN_TAGS}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @classmethod
    def parse(cls, text: str, dim: int = 1) -> "DomainClass":
        key = text.strip()
        tag = _CLI_TAGS.get(key.lower(), key)
        return cls(tag, dim)

    @classmethod
    def of(cls, D: dom.Domain) -> "DomainClass":
        """Class of a catalog domain."""
        if isinstance(D, dom.IntervalUnion):
            tag = "BoundedLipschitz" if len(D.intervals) == 1 and D.bounded else "General1D"
        elif isinstance(D, (dom.Ball, dom.Box, dom.AnnulusUnion)):
            tag = "BoundedLipschitz"
        elif isinstance(D, dom.PuncturedSpace):
            tag = "PuncturedSpace"
        elif isinstance(D, dom.HalfSpaceAboveGraph):
            tag = "AboveLipschitzGraph"
        elif isinstance(D, dom.ComplementOfBox):
            tag = "ComplementBoundedLipschitz"
        else:
            tag = "OpenSetWithSections"
        return cls(tag, int(getattr(D, "dim", 1)))

    def consistent_with(self, D: dom.Domain) -> bool:
        if int(getattr(D, "dim", 1)) != self.dim:
            return False
        if self.tag == "General1D":
            return self.dim == 1
        if self.tag == "OpenSetWithSections":
            return True
        return DomainClass.of(D).tag == self.tag

    def to_dict(self) -> dict:
        return {"tag": self.tag, "dim": self.dim, "bc": _jsonable(self.bc), "sigma": _jsonable(self.sigma),
                "section_bc": _jsonable(self.section_bc), "exterior": _jsonable(self.exterior), "ls": self.ls}


# ---------------------------------------------------------------------------
# gauge context


class _Gauges:
    """Lazily evaluated gauges of ``(nf, s)`` and of the domain."""

    def __init__(self, nf: NFunction, s: float, dc: DomainClass, D: dom.Domain | None):
        self.nf, self.s, self.dc, self.D = nf, s, dc, D
        self.analytic = nf.is_catalog
        self._cache: dict = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # N-function gauges
    def delta2(self) -> Hypothesis:
        def go():
            c = doubling_constant(self.nf)
            return Hypothesis("A in Delta2 (doubling constant)", c, math.isfinite(c), self.analytic)
        return self._memo("delta2", go)

    def p(self) -> Hypothesis:
        def go():
            if not self.delta2().holds:
                return Hypothesis("p", math.inf, False, self.analytic)
            return Hypothesis("p", growth_exponent(self.nf), True, self.analytic)
        return self._memo("p", go)

    def beta(self):
        return self._memo("beta", lambda: beta_limit(self.nf, self.s, probe=not self.analytic))

    def beta_is(self, which: str) -> Hypothesis:
        b = self.beta()
        ok = {"zero": b.classification == "evidence-zero",
              "positive": b.classification == "evidence-positive" and 0 < b.value < math.inf}[which]
        return Hypothesis(f"beta {'= 0' if which == 'zero' else 'in (0, inf)'}", float(b.value), ok, b.analytic)

    def alpha_zero(self, direction: str, weight: float = 0.0) -> Hypothesis:
        def go():
            v = alpha_limit_evidence(self.nf, self.s, direction, weight, probe=not self.analytic)
            lim = "0+" if direction == "to-zero-plus" else "inf"
            name = f"liminf_(lam->{lim}) lam^{weight:g} alpha(lam) = 0" if weight else \
                f"liminf_(lam->{lim}) alpha(lam) = 0"
            return Hypothesis(name, v.classification, v.is_zero, v.analytic)
        return self._memo(("alpha", direction, weight), go)

    # domain gauges
    def bc(self) -> Hypothesis:
        def go():
            tag = self.dc.tag
            if tag == "BoundedLipschitz":
                val = self.dc.bc if self.dc.bc is not None else (
                    self.D.ball_condition() if self.D is not None else "finite")
                return Hypothesis("BC(D)", val, False, True)
            if tag in ("PuncturedSpace", "AboveLipschitzGraph", "ComplementBoundedLipschitz"):
                return Hypothesis("BC(D)", math.inf, False, True)
            if self.dc.bc is not None:
                return Hypothesis("BC(D)", float(self.dc.bc), False, True)
            if self.D is not None:
                return Hypothesis("BC(D)", float(self.D.ball_condition()), False, True)
            return Hypothesis("BC(D)", "unavailable", False, True)
        return self._memo("bc", go)

    def bc_infinite(self) -> Hypothesis:
        h = self.bc()
        return Hypothesis("BC(D) = inf", h.value, h.value == math.inf, h.analytic)

    def bc_finite(self) -> Hypothesis:
        h = self.bc()
        v = h.value
        ok = v == "finite" or (isinstance(v, float) and math.isfinite(v))
        return Hypothesis("BC(D) < inf", v, ok, h.analytic)

    def section_bc_finite(self) -> Hypothesis:
        def go():
            if self.dc.section_bc is not None:
                v = float(self.dc.section_bc)
                return Hypothesis("sup over sections BC(L_D(x, w)) < inf", v, math.isfinite(v), True)
            if self.D is None or self.dc.sigma is None:
                return Hypothesis("sup over sections BC(L_D(x, w)) < inf", "unavailable", False, True)
            v = _section_bc_sup(self.D, self.dc.sigma)
            return Hypothesis("sup over sections BC(L_D(x, w)) < inf", v, math.isfinite(v), False)
        return self._memo("section_bc", go)

    def exterior(self) -> Hypothesis:
        def go():
            name = "|B(x, R) \\ D| > c1 > 0 for all x in D"
            if self.dc.tag == "BoundedLipschitz":
                return Hypothesis(name, "D bounded", True, True)
            if self.dc.exterior is not None:
                R, c1 = self.dc.exterior
                return Hypothesis(name, (float(R), float(c1)), R > 0 and c1 > 0, True)
            if self.dc.tag == "PuncturedSpace":
                return Hypothesis(name, 0.0, False, True)
            if self.D is not None and self.dc.tag in ("OpenSetWithSections", "General1D"):
                bc = self.D.ball_condition()
                R = 2.0 * bc + 1.0 if math.isfinite(bc) else 1.0
                m = dom.exterior_measure_lb(self.D, R)
                lb = m.value - 3.0 * m.std_error
                # centres are sampled, so this is evidence even where each measure is exact
                return Hypothesis(name, (R, lb), lb > 0, False)
            return Hypothesis(name, "unavailable", False, True)
        return self._memo("exterior", go)

    def ls(self) -> Hypothesis:
        if self.dc.ls is not None:
            return Hypothesis("D is LS(s, A)", self.dc.ls, bool(self.dc.ls), True)
        return Hypothesis("D is LS(s, A)", "unavailable", False, True)


def _section_bc_sup(D: dom.Domain, sigma: tuple[float, float]) -> float:
    """Largest half-length of a section component over sampled lines with angles in ``sigma``."""
    if getattr(D, "dim", 1) != 2:
        raise ValueError("section sampling is implemented for planar domains")
    lo, hi = D.bounding_box()
    window = np.where(np.isfinite(lo), lo, -10.0), np.where(np.isfinite(hi), hi, 10.0)
    radius = float(np.linalg.norm(window[1] - window[0])) / 2 + 1.0
    centre = (window[0] + window[1]) / 2
    thetas = sigma[0] + (sigma[1] - sigma[0]) * (np.arange(SECTION_ANGLES) + 0.5) / SECTION_ANGLES
    worst = 0.0
    for th in thetas:
        w = np.array([math.cos(th), math.sin(th)])
        perp = np.array([-w[1], w[0]])
        for b in np.linspace(-radius, radius, SECTION_BASES):
            sec = D.line_section(centre + b * perp - np.dot(centre, w) * w, w)
            for a, c in sec.intervals:
                worst = max(worst, (c - a) / 2.0)
    return worst


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class _Rule:
    tag: str
    classes: tuple[str, ...]
    conclusions: tuple[tuple[str, str], ...]
    hypotheses: Callable[[_Gauges], list[Hypothesis]]
    needs_delta2: bool = False


def _any_of(name: str, options: list[list[Hypothesis]]) -> Hypothesis:
    """Collapse alternatives ``(h11 and h12) or h21 or ...`` into one recorded hypothesis."""
    ok = any(all(h.holds for h in opt) for opt in options)
    desc = tuple(" and ".join(f"{h.name} [{h.value}]" for h in opt) for opt in options)
    return Hypothesis(name, desc, ok, all(h.analytic for opt in options for h in opt))


def _thm14(g: _Gauges):
    w = (1.0 - g.dc.dim) / g.s
    return [_any_of("lam^((1-N)/s) alpha(lam) has liminf 0 at 0+ or at inf",
                    [[g.alpha_zero("to-zero-plus", w)], [g.alpha_zero("to-infinity", w)]])]


def _thm15_1(g: _Gauges):
    return [_any_of("alpha(lam) has liminf 0 at 0 or at inf",
                    [[g.alpha_zero("to-zero-plus")], [g.alpha_zero("to-infinity")]])]


def _thm15_2(g: _Gauges):
    w = (1.0 - g.dc.dim) / g.s
    return [_any_of("exterior alpha condition",
                    [[g.alpha_zero("to-infinity", w), g.alpha_zero("to-zero-plus")],
                     [g.alpha_zero("to-zero-plus", w)],
                     [g.alpha_zero("to-infinity")]])]


RULES: tuple[_Rule, ...] = (
    # beta test
    _Rule("Thm1.3(1)", ("BoundedLipschitz",), (("FOHI", "fails"), ("RFOPI", "fails")),
          lambda g: [g.beta_is("zero")]),
    _Rule("Thm1.3(2)", ("BoundedLipschitz",), (("FOHI", "fails"),),
          lambda g: [g.beta_is("positive")]),
    # alpha limits
    _Rule("Thm1.2", ("BoundedLipschitz",), (("FOHI", "holds"), ("RFOPI", "holds")),
          lambda g: [g.alpha_zero("to-zero-plus")], needs_delta2=True),
    _Rule("Thm1.4", ("PuncturedSpace",), (("FOHI", "holds"),), _thm14, needs_delta2=True),
    _Rule("Thm1.5(1)", ("AboveLipschitzGraph",), (("FOHI", "holds"),), _thm15_1, needs_delta2=True),
    _Rule("Thm1.5(2)", ("ComplementBoundedLipschitz",), (("FOHI", "holds"),), _thm15_2, needs_delta2=True),
    _Rule("Thm1.10(1)", ("OpenSetWithSections",), (("RFOPI", "holds"),),
          lambda g: [g.alpha_zero("to-zero-plus"), g.section_bc_finite()], needs_delta2=True),
    _Rule("Prop5.1", ("General1D",), (("RFOPI", "holds"),),
          lambda g: [g.alpha_zero("to-zero-plus"), g.bc_finite()]),
    _Rule("Prop5.1", ("General1D",), (("RFOPI", "fails"),),
          lambda g: [g.alpha_zero("to-zero-plus"), g.bc_infinite()]),
    # geometry
    _Rule("Prop2.6(4)", DOMAIN_TAGS, (("RFOPI", "fails"), ("FOPI", "fails")),
          lambda g: [g.bc_infinite()]),
    _Rule("Thm1.10(2)", DOMAIN_TAGS, (("FOPI", "holds"),), lambda g: [g.exterior()]),
    _Rule("Thm1.10(3)", DOMAIN_TAGS, (("FOPI", "holds"),), lambda g: [g.ls()]),
)


def _evaluate(rule: _Rule, g: _Gauges) -> list[Hypothesis] | None:
    hyps = []
    if rule.needs_delta2:
        d2 = g.delta2()
        hyps.append(d2)
        if not d2.holds:
            return None
        hyps.append(g.p())
    hyps.extend(rule.hypotheses(g))
    return hyps if all(h.holds for h in hyps) else None


def classify(nf: NFunction, s: float, dc: DomainClass, D: dom.Domain | None = None) -> list[Verdict]:
    """One verdict per inequality, in the order FOHI, RFOPI, FOPI."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if D is not None and not dc.consistent_with(D):
        raise ValueError(f"domain class {dc.tag} (dim {dc.dim}) does not match {type(D).__name__}")
    g = _Gauges(nf, s, dc, D)
    fired: dict[str, list[tuple[str, str, tuple[Hypothesis, ...]]]] = {k: [] for k in INEQUALITIES}
    for rule in RULES:
        if dc.tag not in rule.classes:
            continue
        hyps = _evaluate(rule, g)
        if hyps is None:
            continue
        for ineq, status in rule.conclusions:
            fired[ineq].append((status, rule.tag, tuple(hyps)))
    # P2 >= P1: a Poincare bound on D x D also bounds the full-space numerator
    for status, tag, hyps in fired["RFOPI"]:
        if status == "holds":
            h = Hypothesis(f"RFOPI holds by {tag}", tag, True, all(x.analytic for x in hyps))
            fired["FOPI"].append(("holds", "P2>=P1", hyps + (h,)))
            break
    for ineq, items in fired.items():
        statuses = {it[0] for it in items}
        if len(statuses) > 1:
            tags = ", ".join(f"{it[1]}: {it[0]}" for it in items)
            raise ContradictionError(f"{ineq}: rules disagree ({tags})")
    verdicts = []
    for ineq in INEQUALITIES:
        if fired[ineq]:
            status, tag, hyps = fired[ineq][0]
            grade = "theorem" if all(h.analytic for h in hyps) else "evidence"
            verdicts.append(Verdict(ineq, status, tag, grade, hyps))
        else:
            verdicts.append(Verdict(ineq, "unknown", "", "theorem" if g.analytic else "evidence",
                                    _context(g)))
    st = {v.inequality: v.status for v in verdicts}
    if st["RFOPI"] == "holds" and st["FOPI"] == "fails":
        raise ContradictionError("RFOPI holds while FOPI fails")
    return verdicts


def _context(g: _Gauges) -> tuple[Hypothesis, ...]:
    """Gauges recorded on an undecided verdict."""
    out = []
    if g.dc.tag == "BoundedLipschitz":
        b = g.beta()
        out.append(Hypothesis("beta", float(b.value), True, b.analytic))
    out.append(g.alpha_zero("to-zero-plus"))
    if g.delta2().holds:
        out.append(g.p())
    return tuple(out)


# ---------------------------------------------------------------------------
# verdict table over the catalog gauges

ROWS = ("t^q", "t^q(1+|log t|)", "t^q/log(e+t)", "(1+t)log(1+t)-t")
COLUMNS = ("H>0", "H=0", "P1>0", "P1=0")
# interval cells in terms of 1/q; "NA" is the empty set
TABLE1_GOLDEN = {
    "t^q": ("(1/q,1)", "(0,1/q]", "(1/q,1)", "(0,1/q)"),
    "t^q(1+|log t|)": ("(1/q,1)", "(0,1/q)", "(1/q,1)", "(0,1/q)"),
    "t^q/log(e+t)": ("(1/q,1)", "(0,1/q]", "(1/q,1)", "(0,1/q]"),
    "(1+t)log(1+t)-t": ("NA", "(0,1)", "NA", "(0,1)"),
}
_COLUMN_KEY = {"H>0": ("FOHI", "holds"), "H=0": ("FOHI", "fails"), "P1>0": ("RFOPI", "holds"),
               "P1=0": ("RFOPI", "fails")}


def _row_gauge(row: str, q: float) -> NFunction:
    return {"t^q": lambda: power(q), "t^q(1+|log t|)": lambda: power_log_plus(q),
            "t^q/log(e+t)": lambda: power_log_minus(q), "(1+t)log(1+t)-t": llogl}[row]()


def _in_cell(cell: str, s: float, q: float) -> bool:
    if cell == "NA":
        return False
    left_open, right_open = cell[0] == "(", cell[-1] == ")"
    a, b = (1.0 / q if t == "1/q" else float(t) for t in cell[1:-1].split(","))
    # the boundary s = 1/q is matched to a relative tolerance, not bitwise
    tol = 1e-12

    def eq(x, y):
        return abs(x - y) <= tol * max(1.0, abs(y))

    above = s > a and not eq(s, a) or (not left_open and eq(s, a))
    below = s < b and not eq(s, b) or (not right_open and eq(s, b))
    return above and below


@dataclass
class Table1Report:
    q: float
    s_grid: tuple[float, ...]
    verdicts: dict[tuple[str, float], dict[str, Verdict]]
    cells: dict[tuple[str, str], tuple[float, ...]]
    mismatches: list[str] = field(default_factory=list)

    @property
    def matches_golden(self) -> bool:
        return not self.mismatches

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["A(t)"] + list(COLUMNS))
        for row in ROWS:
            w.writerow([row] + [";".join(repr(float(s)) for s in self.cells[(row, c)]) or "NA" for c in COLUMNS])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"q": self.q, "s_grid": list(self.s_grid), "matches_golden": self.matches_golden,
                "mismatches": list(self.mismatches),
                "cells": [{"row": r, "column": c, "golden": TABLE1_GOLDEN[r][COLUMNS.index(c)],
                           "s": list(v)} for (r, c), v in self.cells.items()]}


def table1(s_grid: Sequence[float], q: float) -> Table1Report:
    """Classify the four catalog gauges on a bounded Lipschitz domain over ``s_grid``."""
    if not q > 1:
        raise ValueError("q must exceed 1")
    grid = tuple(float(s) for s in s_grid)
    dc = DomainClass("BoundedLipschitz")
    verdicts: dict = {}
    cells = {(r, c): [] for r in ROWS for c in COLUMNS}
    mismatches = []
    for row in ROWS:
        nf = _row_gauge(row, q)
        for s in grid:
            vs = {v.inequality: v for v in classify(nf, s, dc)}
            verdicts[(row, s)] = vs
            for j, col in enumerate(COLUMNS):
                ineq, status = _COLUMN_KEY[col]
                got = vs[ineq].status == status
                if got:
                    cells[(row, col)].append(s)
                if got != _in_cell(TABLE1_GOLDEN[row][j], s, q):
                    mismatches.append(f"{row} / {col} at s={s!r}: {ineq} is {vs[ineq].status}")
    return Table1Report(float(q), grid, verdicts, {k: tuple(v) for k, v in cells.items()}, mismatches)


def default_s_grid(q: float) -> list[float]:
    """``0.1, ..., 0.9`` plus the transition point ``1/q``."""
    grid = {float(Fraction(k, 10)) for k in range(1, 10)}
    grid.add(1.0 / q)
    return sorted(grid)


__all__ += ["default_s_grid", "ROWS", "COLUMNS"]


# ---------------------------------------------------------------------------
# LS evidence


@dataclass(frozen=True)
class LSReport:
    is_LS_evidence: bool
    sections_tested: int
    min_section_P2: float
    max_section_length: float

    def to_dict(self) -> dict:
        return {"is_LS_evidence": self.is_LS_evidence, "sections_tested": self.sections_tested,
                "min_section_P2": _jsonable(self.min_section_P2),
                "max_section_length": _jsonable(self.max_section_length)}


def _default_sigma(D: dom.Domain) -> tuple[float, float]:
    if isinstance(D, dom.StripUnion):
        return (0.0, math.pi / 4)
    return (0.0, math.pi)


def ls_check(nf: NFunction, s: float, D: dom.Domain, *, sigma: tuple[float, float] | None = None,
             n_angles: int = SECTION_ANGLES, n_bases: int = 2, budget=None, seed: int = 0) -> LSReport:
    """Sample line sections of ``D`` along directions in ``sigma`` and estimate ``P2`` on each.

    Sections are translated to start at 0 and identical shapes are estimated
    once.  A section with an unbounded component has ``BC = inf`` and so
    ``P2 = 0``, which makes the evidence negative.
    """
    from .variational import Budget, estimate_quotient

    if getattr(D, "dim", 1) != 2:
        raise ValueError("ls_check needs a planar domain")
    sigma = sigma if sigma is not None else _default_sigma(D)
    budget = budget if budget is not None else Budget(grid_sizes=(12,), restarts=2, max_iters=60, grading=1.0)
    rng = np.random.default_rng(seed)
    lo, hi = D.bounding_box()
    lo = np.where(np.isfinite(lo), lo, -5.0)
    hi = np.where(np.isfinite(hi), hi, 5.0)
    thetas = sigma[0] + (sigma[1] - sigma[0]) * (np.arange(n_angles) + 0.5) / n_angles
    cache: dict = {}
    tested = 0
    worst = math.inf
    longest = 0.0
    for th in thetas:
        w = np.array([math.cos(th), math.sin(th)])
        for _ in range(n_bases):
            x = lo + (hi - lo) * rng.uniform(size=2)
            x = x - np.dot(x, w) * w
            sec = D.line_section(x, w)
            if not sec.intervals:
                continue
            tested += 1
            ivs = sec.intervals
            longest = max(longest, max(b - a for a, b in ivs))
            if any(not math.isfinite(a) or not math.isfinite(b) for a, b in ivs):
                worst = 0.0
                continue
            key = tuple((round(a - ivs[0][0], 12), round(b - ivs[0][0], 12)) for a, b in ivs)
            if key not in cache:
                est = estimate_quotient("P2", nf, dom.IntervalUnion(key), s, budget)
                cache[key] = est.value
            worst = min(worst, cache[key])
    if tested == 0:
        return LSReport(False, 0, math.nan, 0.0)
    return LSReport(bool(math.isfinite(longest) and worst > 0), tested, float(worst), float(longest))
