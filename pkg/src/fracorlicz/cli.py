"""Command-line front end.

Subcommands ``classify``, ``gauges``, ``estimate`` and ``table1``.  Every
report embeds the resolved problem spec and the library version; no
timestamps are written, so equal inputs give byte-identical output.

Exit codes: 0 success, 2 malformed spec, 3 rule contradiction,
4 invalid N-function, 5 degenerate trial.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import ContradictionError, DomainClass, classify, default_s_grid, table1
from .domain import Box, DomainSpecError, domain_from_spec, parse_domain
from .trial import CutoffError
from .variational import DegenerateTrial
from .nfunction import (InvalidNFunction, NotDelta2Error, alpha, beta_limit, doubling_constant, from_spec,
                        growth_exponent, parse_nfunction)

EXIT_OK, EXIT_SCHEMA, EXIT_CONTRADICTION, EXIT_NFUNCTION, EXIT_DEGENERATE = 0, 2, 3, 4, 5


class SpecError(ValueError):
    """Schema problem in a problem spec; the message names the field."""


# ---------------------------------------------------------------------------
# spec handling

_FIELDS = {
    "classify": {"nfunction", "s", "domain_class", "domain", "dim", "format"},
    "gauges": {"nfunction", "s", "alpha_grid", "beta", "p", "doubling", "format"},
    "estimate": {"nfunction", "s", "domain", "kind", "budget", "grid", "restarts", "max_iters", "amplitude_grid",
                 "seed", "sweep", "k_min", "k_max", "check", "n_angles", "history", "format"},
    "table1": {"q", "s_grid", "format"},
}


def _load_spec(path: str | None, command: str) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"{path}: cannot read spec file ({exc.strerror})") from exc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(spec, dict):
        raise SpecError(f"{path}: top level must be an object")
    cmd = spec.pop("command", command)
    if cmd != command:
        raise SpecError(f"{path}: field 'command' is {cmd!r}, expected {command!r}")
    unknown = sorted(set(spec) - _FIELDS[command])
    if unknown:
        raise SpecError(f"{path}: unknown field(s) {unknown} for {command}")
    return spec


def _merge(args: argparse.Namespace, spec: dict, keys) -> dict:
    """Command-line values win over spec-file values."""
    out = {}
    for k in keys:
        v = getattr(args, k, None)
        out[k] = v if v is not None else spec.get(k)
    return out


def _nfunction(value):
    if value is None:
        raise SpecError("field 'nfunction' is required")
    if isinstance(value, dict):
        return from_spec(value)
    if isinstance(value, str):
        return parse_nfunction(value)
    raise SpecError("field 'nfunction' must be a string or an object")


def _domain(value, default=None):
    if value is None:
        if default is None:
            raise SpecError("field 'domain' is required")
        value = default
    if isinstance(value, dict):
        return domain_from_spec(value)
    if isinstance(value, str):
        return parse_domain(value)
    raise SpecError("field 'domain' must be a string or an object")


def _s(value):
    if value is None:
        raise SpecError("field 's' is required")
    try:
        s = float(value)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"field 's' is not a number: {value!r}") from exc
    if not 0 < s < 1:
        raise SpecError(f"field 's' must lie in (0, 1), got {s}")
    return s


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.floating):
        return _jsonable(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _emit(report: dict, rows: list[list] | None, header: list[str] | None, fmt: str, output: str | None):
    if fmt == "json" or rows is None:
        text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# fracorlicz {__version__}\n")
        buf.write("# spec: " + json.dumps(_jsonable(report["spec"]), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
        text = buf.getvalue()
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _report(command: str, spec: dict, result) -> dict:
    return {"command": command, "version": __version__, "spec": spec, "result": result}


# ---------------------------------------------------------------------------
# commands

def cmd_classify(args) -> int:
    spec = _merge(args, _load_spec(args.spec, "classify"), ("nfunction", "s", "domain_class", "domain", "dim"))
    nf = _nfunction(spec["nfunction"])
    s = _s(spec["s"])
    D = _domain(spec["domain"]) if spec["domain"] is not None else None
    if spec["domain_class"] is None:
        if D is None:
            raise SpecError("one of 'domain_class' or 'domain' is required")
        dc = DomainClass.of(D)
    else:
        dim = int(spec["dim"]) if spec["dim"] is not None else int(getattr(D, "dim", 1)) if D is not None else 1
        try:
            dc = DomainClass.parse(str(spec["domain_class"]), dim)
        except ValueError as exc:
            raise SpecError(f"field 'domain_class': {exc}") from exc
    verdicts = classify(nf, s, dc, D)
    resolved = {"nfunction": nf.to_spec(), "s": s, "domain_class": dc.to_dict(),
                "domain": D.to_spec() if D is not None else None, "format": args.format}
    rows = [[v.inequality, v.status, v.rule, v.grade,
             ";".join(f"{h.name}={_jsonable(h.value)}" for h in v.evidence)] for v in verdicts]
    _emit(_report("classify", resolved, [v.to_dict() for v in verdicts]), rows,
          ["inequality", "status", "rule", "grade", "evidence"], args.format, args.output)
    return EXIT_OK


def _alpha_grid(text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise SpecError(f"field 'alpha_grid' must be lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise SpecError(f"field 'alpha_grid' is not numeric: {text!r}") from exc
    if not (0 < lo <= hi) or n < 1:
        raise SpecError("field 'alpha_grid' needs 0 < lo <= hi and n >= 1")
    return np.logspace(math.log10(lo), math.log10(hi), n)


def cmd_gauges(args) -> int:
    spec = _merge(args, _load_spec(args.spec, "gauges"), ("nfunction", "s", "alpha_grid", "beta", "p", "doubling"))
    nf = _nfunction(spec["nfunction"])
    result: dict = {}
    rows, header = None, None
    needs_s = spec["alpha_grid"] is not None or spec["beta"]
    s = _s(spec["s"]) if needs_s else (float(spec["s"]) if spec["s"] is not None else None)
    if spec["alpha_grid"] is not None:
        lams = _alpha_grid(spec["alpha_grid"])
        vals = [alpha(nf, s, float(l)) for l in lams]
        result["alpha"] = [{"lambda": float(l), "alpha": v} for l, v in zip(lams, vals)]
        rows, header = [[float(l), v] for l, v in zip(lams, vals)], ["lambda", "alpha"]
    if spec["beta"]:
        b = beta_limit(nf, s)
        result["beta"] = {"value": b.value, "numeric": b.numeric, "classification": b.classification,
                          "analytic": b.analytic, "final_probe": b.final_probe}
    if spec["doubling"]:
        result["doubling_constant"] = doubling_constant(nf)
    if spec["p"]:
        result["p"] = growth_exponent(nf)
    if rows is None:
        scalars = [(k, result[k]["value"] if k == "beta" else result[k]) for k in ("beta", "doubling_constant", "p")
                   if k in result]
        rows, header = [[k, float(v)] for k, v in scalars], ["gauge", "value"]
    resolved = {"nfunction": nf.to_spec(), "s": s, "alpha_grid": spec["alpha_grid"], "beta": bool(spec["beta"]),
                "p": bool(spec["p"]), "doubling": bool(spec["doubling"]), "format": args.format}
    _emit(_report("gauges", resolved, result), rows, header, args.format, args.output)
    return EXIT_OK


def cmd_estimate(args) -> int:
    from .trial import Polynomial, TensorProduct
    from .modular import polar_identity_check
    from .variational import Budget, CutoffFamily, cutoff_sweep, estimate_quotient, write_history_csv

    keys = ("nfunction", "s", "domain", "kind", "budget", "grid", "restarts", "max_iters", "amplitude_grid", "seed",
            "sweep", "k_min", "k_max", "check", "n_angles", "history")
    spec = _merge(args, _load_spec(args.spec, "estimate"), keys)
    nf = _nfunction(spec["nfunction"])
    s = _s(spec["s"])
    modes = [m for m in ("sweep", "check") if spec[m] is not None]
    if len(modes) > 1:
        raise SpecError("'sweep' and 'check' are mutually exclusive")
    if spec["sweep"] is not None:
        if spec["sweep"] != "cutoff":
            raise SpecError(f"field 'sweep' must be 'cutoff', got {spec['sweep']!r}")
        D = _domain(spec["domain"], "interval:0,1")
        kmin = int(spec["k_min"] if spec["k_min"] is not None else 2)
        kmax = int(spec["k_max"] if spec["k_max"] is not None else 8)
        fam = CutoffFamily.dyadic(kmin, kmax)
        rows = cutoff_sweep(nf, D, s, fam, workers=args.threads)
        resolved = {"nfunction": nf.to_spec(), "s": s, "domain": D.to_spec(), "sweep": "cutoff", "k_min": kmin,
                    "k_max": kmax, "format": args.format}
        result = [{"eps": r.eps, "hardy_quotient": r.hardy_quotient, "poincare_quotient": r.poincare_quotient,
                   "divergent": r.divergent, "numerator": r.numerator, "hardy_denominator": r.hardy_denominator,
                   "la_denominator": r.la_denominator} for r in rows]
        table = [[r.eps, r.hardy_quotient, r.poincare_quotient, int(r.divergent)] for r in rows]
        _emit(_report("estimate", resolved, result), table,
              ["eps", "hardy_quotient", "poincare_quotient", "divergent"], args.format, args.output)
        return EXIT_OK
    if spec["check"] is not None:
        if spec["check"] != "polar":
            raise SpecError(f"field 'check' must be 'polar', got {spec['check']!r}")
        D = _domain(spec["domain"], "box2d")
        if not isinstance(D, Box) or D.dim != 2:
            raise SpecError("the polar check needs a two-dimensional box domain")
        n_angles = int(spec["n_angles"] if spec["n_angles"] is not None else 256)
        f = TensorProduct(Polynomial.bump(D.lo[0], D.hi[0], 2), Polynomial.bump(D.lo[1], D.hi[1], 2))
        lhs, rhs = polar_identity_check(nf, D, s, f, n_angles)
        rel = abs(lhs.value - rhs.value) / abs(lhs.value)
        resolved = {"nfunction": nf.to_spec(), "s": s, "domain": D.to_spec(), "check": "polar",
                    "n_angles": n_angles, "trial": f.to_spec(), "format": args.format}
        result = {"lhs": lhs.value, "lhs_error": lhs.abs_error_estimate, "rhs": rhs.value,
                  "rhs_error": rhs.abs_error_estimate, "relative_difference": rel}
        _emit(_report("estimate", resolved, result), [[lhs.value, rhs.value, rel]],
              ["lhs", "rhs", "relative_difference"], args.format, args.output)
        return EXIT_OK

    kind = str(spec["kind"] or "").upper()
    if kind not in ("H", "P1", "P2"):
        raise SpecError(f"field 'kind' must be one of h, p1, p2, got {spec['kind']!r}")
    D = _domain(spec["domain"])
    bspec = dict(spec["budget"] or {})
    if not isinstance(bspec, dict):
        raise SpecError("field 'budget' must be an object")
    for key in ("restarts", "max_iters", "amplitude_grid", "seed"):
        if spec[key] is not None:
            bspec[key] = int(spec[key])
    if spec["grid"] is not None:
        g = spec["grid"]
        bspec["grid_sizes"] = [int(v) for v in (g if isinstance(g, list) else [g])]
    bspec.setdefault("seed", 0)
    try:
        budget = Budget.from_spec(bspec)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"field 'budget': {exc}") from exc
    est = estimate_quotient(kind, nf, D, s, budget)
    if spec["history"]:
        write_history_csv(est, spec["history"])
    resolved = {"nfunction": nf.to_spec(), "s": s, "domain": D.to_spec(), "kind": kind, "budget": budget.to_spec(),
                "history": spec["history"], "format": args.format}
    rows = [[n, v] for n, v in est.per_grid]
    _emit(_report("estimate", resolved, est.to_dict()), rows, ["grid", "value"], args.format, args.output)
    return EXIT_OK


def cmd_table1(args) -> int:
    spec = _merge(args, _load_spec(args.spec, "table1"), ("q", "s_grid"))
    q = float(spec["q"] if spec["q"] is not None else 2.0)
    if not q > 1:
        raise SpecError(f"field 'q' must exceed 1, got {q}")
    grid = spec["s_grid"]
    if grid is None:
        grid = default_s_grid(q)
    elif isinstance(grid, str):
        try:
            grid = [float(v) for v in grid.split(",") if v.strip()]
        except ValueError as exc:
            raise SpecError(f"field 's_grid' is not a list of numbers: {grid!r}") from exc
    if any(not 0 < v < 1 for v in grid):
        raise SpecError("field 's_grid' entries must lie in (0, 1)")
    rep = table1(grid, q)
    resolved = {"q": q, "s_grid": list(rep.s_grid), "format": args.format}
    if args.format == "csv":
        text = (f"# fracorlicz {__version__}\n# spec: " + json.dumps(resolved, sort_keys=True) + "\n"
                + rep.to_csv())
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(_report("table1", resolved, rep.to_dict()), None, None, "json", args.output)
    return EXIT_OK if rep.matches_golden else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracorlicz", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fracorlicz {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--spec", help="JSON problem spec; command-line flags override its fields")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.add_argument("--threads", type=int, default=1, help="cap on worker threads")
        sp.add_argument("--seed", type=int, default=None, help="seed for multi-start and sampling (default 0)")

    c = sub.add_parser("classify", help="verdicts for FOHI, RFOPI and FOPI")
    common(c)
    c.add_argument("--nfunction")
    c.add_argument("--s", type=float)
    c.add_argument("--domain-class", dest="domain_class")
    c.add_argument("--domain")
    c.add_argument("--dim", type=int)
    c.set_defaults(func=cmd_classify)

    g = sub.add_parser("gauges", help="alpha, beta, doubling constant and growth exponent")
    common(g)
    g.add_argument("--nfunction")
    g.add_argument("--s", type=float)
    g.add_argument("--alpha-grid", dest="alpha_grid", help="lo:hi:n, log-spaced")
    g.add_argument("--beta", action="store_const", const=True)
    g.add_argument("--p", action="store_const", const=True)
    g.add_argument("--doubling", action="store_const", const=True)
    g.set_defaults(func=cmd_gauges)

    e = sub.add_parser("estimate", help="quotient upper bounds, cutoff sweep, polar identity check")
    common(e)
    e.add_argument("--nfunction")
    e.add_argument("--s", type=float)
    e.add_argument("--domain")
    e.add_argument("--kind", type=str.lower, choices=("h", "p1", "p2"))
    e.add_argument("--grid", type=int, action="append")
    e.add_argument("--restarts", type=int)
    e.add_argument("--max-iters", dest="max_iters", type=int)
    e.add_argument("--amplitude-grid", dest="amplitude_grid", type=int)
    e.add_argument("--budget", type=_json_arg, help="budget as a JSON object")
    e.add_argument("--sweep", choices=("cutoff",))
    e.add_argument("--k-min", dest="k_min", type=int)
    e.add_argument("--k-max", dest="k_max", type=int)
    e.add_argument("--check", choices=("polar",))
    e.add_argument("--n-angles", dest="n_angles", type=int)
    e.add_argument("--history", help="write the (iteration, value) history CSV here")
    e.set_defaults(func=cmd_estimate)

    t = sub.add_parser("table1", help="verdict table for the four catalog gauges")
    common(t)
    t.add_argument("--q", type=float)
    t.add_argument("--s-grid", dest="s_grid", help="comma-separated s values (default 0.1..0.9 and 1/q)")
    t.set_defaults(func=cmd_table1)
    return p


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except DegenerateTrial as exc:
        print(f"degenerate trial: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ContradictionError as exc:
        print(f"internal contradiction: {exc}", file=sys.stderr)
        return EXIT_CONTRADICTION
    except (InvalidNFunction, NotDelta2Error) as exc:
        print(f"invalid nfunction: {exc}", file=sys.stderr)
        return EXIT_NFUNCTION
    except (SpecError, DomainSpecError, CutoffError, ValueError) as exc:
        # remaining ValueErrors are precondition failures on the inputs
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
