"""Command-line front end: ``dimlab <command> [options]``.

Every command prints one JSON document (or a CSV table with ``--sweep``).
Exit codes: 0 ok, 1 usage, 2 domain error, 3 budget exceeded, 4 inconclusive
bracket, 5 selftest failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BudgetExceeded, DomainError, InconclusiveError, InvariantViolation, resolve_budget

EXIT_USAGE, EXIT_DOMAIN, EXIT_BUDGET, EXIT_INCONCLUSIVE, EXIT_SELFTEST = 1, 2, 3, 4, 5
SIG_DIGITS = 12

RESULT_SCHEMA = {
    "type": "object",
    "required": ["command", "params", "value", "bracket", "residuals", "level", "truncation",
                 "exact", "method", "manifest"],
    "properties": {
        "command": {"type": "string"},
        "params": {"type": "object"},
        "value": {},
        "bracket": {"anyOf": [{"type": "null"},
                              {"type": "array", "items": {"type": ["number", "null"]},
                               "minItems": 2, "maxItems": 2}]},
        "residuals": {"type": "object"},
        "level": {"type": ["integer", "null"]},
        "truncation": {},
        "exact": {"type": "object",
                  "additionalProperties": {
                      "anyOf": [{"type": "object", "required": ["numerator", "denominator"],
                                 "properties": {"numerator": {"type": "string"},
                                                "denominator": {"type": "string"}}},
                                {"type": "array"}, {"type": "string"}]}},
        "method": {"type": "string"},
        "details": {"type": "object"},
        "manifest": {
            "type": "object",
            "required": ["command", "params", "precision", "budget", "seed", "version",
                         "wall_time_ms", "argv"],
            "properties": {"argv": {"type": "array", "items": {"type": "string"}},
                           "budget": {"type": "integer"}, "seed": {"type": "integer"},
                           "wall_time_ms": {"type": "number"}},
        },
    },
}

PRECISION = {
    "float": "IEEE binary64",
    "beta_cylinders": "extended precision (np.longdouble)",
    "continued_fractions": "exact integers",
    "guard_factor": 64,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def fmt(x):
    """Round floats to 12 significant digits; non-finite floats become strings."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, Fraction):
        return fmt(float(x))
    if isinstance(x, dict):
        return {str(k): fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [fmt(v) for v in x]
    return x


def rational(q) -> dict:
    q = Fraction(q)
    return {"numerator": str(q.numerator), "denominator": str(q.denominator)}


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------

def parse_beta(text):
    from .symbolic import BetaSystem
    try:
        return BetaSystem.parse(text)
    except (ValueError, TypeError) as exc:
        raise DomainError(f"bad --beta value {text!r}: {exc}") from exc


def load_table(path: str, lipschitz=None):
    from .thermo import Potential
    data = np.loadtxt(path, delimiter=None if not path.endswith(".csv") else ",", ndmin=2)
    if data.shape[1] != 2:
        raise DomainError(f"{path}: expected two columns (x, value)")
    return Potential.tabulated(data[:, 1], lipschitz=lipschitz, grid=data[:, 0])


def parse_potential(text: str, system=None):
    """``term[,term...]`` with ``term = [coef*](const:c | table:path[:L] | loggprime | logbeta)``."""
    from .thermo import Potential
    total = Potential()
    for raw in text.split(","):
        raw = raw.strip()
        if not raw:
            continue
        coef = 1.0
        if "*" in raw:
            c, raw = raw.split("*", 1)
            coef = float(c)
        if raw.startswith("const:"):
            term = Potential.constant(float(raw[6:]))
        elif raw.startswith("table:"):
            spec = raw[6:]
            path, _, lip = spec.partition(":") if not Path(spec).exists() else (spec, "", "")
            term = load_table(path, float(lip) if lip else None)
        elif raw == "loggprime":
            term = Potential.log_gauss_derivative()
        elif raw == "logbeta":
            if system is None:
                raise DomainError("logbeta needs --beta")
            term = Potential.log_beta(system)
        else:
            raise DomainError(f"unknown potential term {raw!r}")
        total = total + term * coef
    return total


def parse_set(text: str) -> list:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        a, b = chunk.split(",")
        out.append((float(a), float(b)))
    if not out:
        raise DomainError("empty --set")
    return out


def parse_ints(text: str) -> tuple:
    return tuple(int(x) for x in text.replace(";", ",").split(",") if x.strip())


# ---------------------------------------------------------------------------
# commands: each returns the result fields (value, bracket, ...)
# ---------------------------------------------------------------------------

def _result(value, bracket=None, residuals=None, level=None, truncation=None, exact=None,
            method="", details=None):
    return {"value": value, "bracket": list(bracket) if bracket is not None else None,
            "residuals": residuals or {}, "level": level, "truncation": truncation,
            "exact": exact or {}, "method": method, "details": details or {}}


def _dim_result(res):
    return _result(res.value, res.bracket,
                   {"lower": res.residual_lower, "upper": res.residual_upper},
                   res.level, res.truncation, method=res.method, details=res.details)


def cmd_pressure(a):
    from .thermo import pressure_beta, pressure_gauss
    if a.system == "beta":
        system = parse_beta(a.beta)
        pot = parse_potential(a.potential, system)
        br = pressure_beta(pot, system, a.n, budget=a.budget)
        method = "full-word Fekete + first-return lower, sup-sum upper"
    else:
        pot = parse_potential(a.potential)
        alphabet = parse_ints(a.alphabet) if a.alphabet else None
        br = pressure_gauss(pot, a.n, digit_cap=None if alphabet else a.digit_cap,
                            alphabet=alphabet, budget=a.budget, margin=a.margin)
        method = "inf-sum / sup-sum with tail bound, Collatz-Wielandt refinement"
    return _result(br.estimate, (br.lower, br.upper), {}, br.level, br.truncation,
                   method=method, details={"tail_bound": br.tail_bound, **br.details})


def cmd_dim_beta(a):
    from .thermo import solve_dimension_beta
    system = parse_beta(a.beta)
    res = solve_dimension_beta(parse_potential(a.f, system), system, tol=a.tol, n=a.n, budget=a.budget)
    return _dim_result(res)


def cmd_dim_gauss(a):
    from .thermo import solve_dimension_gauss
    alphabet = parse_ints(a.alphabet) if a.alphabet else None
    res = solve_dimension_gauss(parse_potential(a.f), tol=a.tol, digit_cap=a.digit_cap, n=a.n,
                                alphabet=alphabet, budget=a.budget, margin=a.margin)
    return _dim_result(res)


def cmd_dim_fmb(a):
    from .thermo import solve_fmb
    res = solve_fmb(a.m, a.B, tol=a.tol, digit_cap=a.digit_cap, n=a.n, budget=a.budget, margin=a.margin)
    return _dim_result(res)


def cmd_gm(a):
    from .thermo import g_m
    v = g_m(a.m, a.u, limit=a.limit)
    exact = {}
    fu = Fraction(str(a.u)) if a.u_exact else None
    if fu is not None and 0.5 < fu <= 1:
        r = (1 - fu) / fu
        exact["value"] = rational((2 * fu - 1) / (1 - r ** a.m))
    return _result(v, (v, v), method="closed form (2u-1)/(1-((1-u)/u)^m)", exact=exact)


def cmd_alphas(a):
    from .thermo import alpha_cascade, cascade_residuals, log_alpha_cascade
    al = alpha_cascade(a.m, a.B, a.u)
    return _result(al, None, cascade_residuals(a.m, a.B, a.u) if a.m > 1 else {},
                   method="log-space cascade", details={"log_alphas": log_alpha_cascade(a.m, a.B, a.u)})


def cmd_w_stage(a):
    from .constructions import TargetSpec, w_stage
    system = parse_beta(a.beta)
    spec = TargetSpec.affine(a.c0, a.c1) if a.c1 else TargetSpec.point(a.c0)
    st = w_stage(system, parse_potential(a.f, system), a.N, spec, budget=a.budget)
    rows = [{"level": t.level, "word": "".join(map(str, t.word)), "lo": t.lo, "hi": t.hi,
             "log_length": t.log_length, "boundary": t.boundary} for t in st]
    return _result(len(st), None, level=a.N, method="affine solve on full cylinders",
                   details={"intervals": rows})


def _fmb_u(a):
    if a.u is not None:
        return a.u
    from .thermo import solve_fmb
    return solve_fmb(a.m, a.B, digit_cap=a.digit_cap, n=2).value


def cmd_fmb_stage(a):
    from .constructions import fmb_cantor
    prefix = parse_ints(a.prefix) if a.prefix else None
    u = _fmb_u(a)
    st = fmb_cantor(prefix, a.m, a.B, u, a.n, budget=a.budget)
    sep = st.separation
    exact = {"blocks": [[rational(x) for x in c.interval] for c in st.blocks]}
    if sep.min_gap is not None:
        exact["min_gap"] = rational(sep.min_gap)
        exact["min_gap_over_bound"] = rational(sep.min_slack)
    return _result(len(st), None, level=a.n + a.m, exact=exact, method="even-digit windows, exact rationals",
                   details={"u": u, "alphas": st.alphas, "windows": st.windows, "digits": st.digits,
                            "separation_passed": sep.passed, "pairs": sep.pairs,
                            "words": [list(c.word) for c in st.blocks]})


def cmd_holder(a):
    from .constructions import fmb_cantor, lambda_measure
    from .geometry import holder_scan
    u = _fmb_u(a)
    st = fmb_cantor(parse_ints(a.prefix) if a.prefix else None, a.m, a.B, u, a.n, budget=a.budget)
    rep = holder_scan(lambda_measure(st), u, st.prefix.q, a.B, a.n, a.m, constant=a.constant)
    return _result(rep.exponent, None, level=a.n + a.m, method="log-grid ball scan",
                   details={"u": u, "witness_center": rep.witness_center, "witness_radius": rep.witness_radius,
                            "max_ratio": rep.max_ratio, "lemma_constant": rep.lemma_constant,
                            "case1_ratio": rep.case1_ratio, "constant": rep.constant})


def cmd_content(a):
    from .geometry import hausdorff_content_1d
    est = hausdorff_content_1d(parse_set(a.set), a.s, method=a.method)
    return _result(est.value, (est.value, est.value), method=est.method,
                   details={"cover": est.cover})


def cmd_mdp(a):
    from .geometry import WeightedIntervalMeasure, mdp_constant_scan
    comps = parse_set(a.set)
    masses = [float(x) for x in a.masses.split(",")] if a.masses else None
    mu = WeightedIntervalMeasure.from_components(comps, masses)
    scan = mdp_constant_scan(mu, a.s, depth=a.depth)
    return _result(scan.c_est, None, method="endpoint pairs + dyadic balls",
                   details={"certificate": scan.certificate, "center": scan.center,
                            "radius": scan.radius, "candidates": scan.candidates, "note": scan.note})


def cmd_cover_exponent(a):
    from .constructions import natural_cover_exponent
    system = parse_beta(a.beta)
    ce = natural_cover_exponent(system, parse_potential(a.f, system), a.N, tol=a.tol, budget=a.budget)
    return _result(ce.value, ce.bracket, ce.rates, a.N, method="consecutive-level sum ratio")


def cmd_conformality(a):
    from .geometry import quasi_conformality_check
    if a.system == "beta":
        system = parse_beta(a.beta)
        pot = parse_potential(a.potential or "const:0", system)
        prefix = parse_ints(a.prefix or "0")
    else:
        system = "gauss"
        pot = parse_potential(a.potential or "-1*loggprime")
        prefix = parse_ints(a.prefix or "1")
    rep = quasi_conformality_check(system, pot, prefix, a.depth, digit_cap=a.digit_cap, budget=a.budget)
    return _result(rep.constant, None, level=len(prefix) + a.depth, method="Gibbs-weight ratios",
                   details={"geometric_constant": rep.geometric_constant, "words": rep.words,
                            "witnesses": [["".join(map(str, w)) if a.system == "beta" else list(w), r]
                                          for w, r in rep.witnesses]})


def cmd_selftest(a):
    from .acceptance import run_all
    buf = io.StringIO()
    stdout, sys.stdout = sys.stdout, buf
    try:
        results = run_all(print_lines=True)
    finally:
        sys.stdout = stdout
    sys.stderr.write(buf.getvalue())
    passed = sum(r.passed for r in results)
    return _result(passed, None, {str(r.number): r.passed for r in results},
                   method="acceptance checks",
                   details={"total": len(results), "lines": [r.line() for r in results]})


COMMANDS = {
    "pressure": cmd_pressure, "dim-beta": cmd_dim_beta, "dim-gauss": cmd_dim_gauss,
    "dim-fmb": cmd_dim_fmb, "gm": cmd_gm, "alphas": cmd_alphas, "w-stage": cmd_w_stage,
    "fmb-stage": cmd_fmb_stage, "holder": cmd_holder, "content": cmd_content, "mdp": cmd_mdp,
    "cover-exponent": cmd_cover_exponent, "conformality": cmd_conformality, "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--budget", type=int, default=None, help="enumeration node budget")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="recorded in the manifest")
    common.add_argument("--sweep", help="NAME=start:stop:step; emits CSV")

    p = _Parser(prog="dimlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"dimlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    s = add("pressure", "pressure bracket at a finite level")
    s.add_argument("--system", choices=["beta", "gauss"], default="beta")
    s.add_argument("--beta", default="2")
    s.add_argument("--potential", default="const:0")
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--digit-cap", type=int, default=1000)
    s.add_argument("--alphabet")
    s.add_argument("--margin", type=float, default=0.05)

    s = add("dim-beta", "root of P(-s(f + log beta)) = 0")
    s.add_argument("--beta", default="2")
    s.add_argument("--f", default="const:0")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--n", type=int, default=12)

    s = add("dim-gauss", "root of P(-t(f + log|G'|)) = 0")
    s.add_argument("--f", default="const:0")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--digit-cap", type=int, default=2000)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--alphabet")
    s.add_argument("--margin", type=float, default=0.05)

    s = add("dim-fmb", "root of P(-u log|G'|) - g_m(u) log B = 0")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--B", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--digit-cap", type=int, default=400)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--margin", type=float, default=0.05)

    s = add("gm", "the exponent g_m(u)")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--u", type=float, required=True)
    s.add_argument("--limit", action="store_true", help="report the removable value at u = 1/2")

    s = add("alphas", "the alpha cascade")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--B", type=float, required=True)
    s.add_argument("--u", type=float, required=True)

    s = add("w-stage", "target intervals in full cylinders up to level N")
    s.add_argument("--beta", default="2")
    s.add_argument("--f", default="const:0.6931471805599453")
    s.add_argument("--N", type=int, default=6)
    s.add_argument("--c0", type=float, default=0.5)
    s.add_argument("--c1", type=float, default=0.0)

    for name, help_ in (("fmb-stage", "the even-digit Cantor stage"), ("holder", "Hölder exponent scan")):
        s = add(name, help_)
        s.add_argument("--m", type=int, default=1)
        s.add_argument("--B", type=float, default=2.0)
        s.add_argument("--u", type=float, default=None, help="defaults to the F_m(B) root")
        s.add_argument("--n", type=int, default=2)
        s.add_argument("--prefix")
        s.add_argument("--digit-cap", type=int, default=400)
        if name == "holder":
            s.add_argument("--constant", type=float, default=64.0)

    s = add("content", "exact Hausdorff content of an interval union")
    s.add_argument("--set", required=True, help="a,b;c,d;...")
    s.add_argument("--s", type=float, required=True)
    s.add_argument("--method", choices=["dp", "brute"], default="dp")

    s = add("mdp", "mass distribution constant scan")
    s.add_argument("--set", default="0,1")
    s.add_argument("--masses")
    s.add_argument("--s", type=float, required=True)
    s.add_argument("--depth", type=int, default=12)

    s = add("cover-exponent", "convergence exponent of target-interval sums")
    s.add_argument("--beta", default="2")
    s.add_argument("--f", default="const:0.6931471805599453")
    s.add_argument("--N", type=int, default=12)
    s.add_argument("--tol", type=float, default=1e-9)

    s = add("conformality", "quasi-self-conformality constant")
    s.add_argument("--system", choices=["beta", "gauss"], default="beta")
    s.add_argument("--beta", default="2")
    s.add_argument("--potential", default=None,
                   help="defaults to const:0 (beta) or -1*loggprime (gauss)")
    s.add_argument("--prefix", default=None)
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--digit-cap", type=int, default=8)

    add("selftest", "run the acceptance checks")
    return p


def _frange(spec: str) -> list:
    start, stop, step = (float(x) for x in spec.split(":"))
    if step <= 0 or stop < start:
        raise DomainError("sweep needs start <= stop and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _params(a) -> dict:
    skip = {"command", "out", "sweep"}
    return {k: v for k, v in vars(a).items() if k not in skip}


def _manifest(a, argv, wall_ms, budget) -> dict:
    return {"command": a.command, "params": fmt(_params(a)), "precision": PRECISION,
            "budget": budget, "seed": a.seed, "version": __version__,
            "wall_time_ms": round(wall_ms, 3), "argv": list(argv), "threads": a.threads}


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _run_sweep(a, argv, fn) -> str:
    name, _, rng = a.sweep.partition("=")
    key = name.replace("-", "_")
    if not rng or not hasattr(a, key):
        raise UsageError(f"--sweep: unknown parameter {name!r} for {a.command}")
    buf = io.StringIO()
    w = csv.writer(buf)  # RFC 4180: CRLF line ends, minimal quoting
    w.writerow([name, "value", "bracket_lo", "bracket_hi", "residual_lower", "residual_upper",
                "level", "method"])
    kind = type(getattr(a, key)) if getattr(a, key) is not None else float
    for x in _frange(rng):
        setattr(a, key, kind(x) if kind in (int, float) else x)
        r = fn(a)
        br = r["bracket"] or [None, None]
        w.writerow([fmt(x), fmt(r["value"]), fmt(br[0]), fmt(br[1]),
                    fmt(r["residuals"].get("lower")), fmt(r["residuals"].get("upper")),
                    r["level"], r["method"]])
    return buf.getvalue()


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    a.u_exact = a.command == "gm"
    budget = resolve_budget(a.budget)
    a.budget = budget
    fn = COMMANDS[a.command]
    t0 = time.perf_counter()
    try:
        if a.sweep:
            _emit(_run_sweep(a, argv, fn), a.out)
            return 0
        res = fn(a)
    except UsageError as exc:
        sys.stderr.write(f"dimlab: error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, InvariantViolation) as exc:
        _error(a, "domain", exc)
        return EXIT_DOMAIN
    except BudgetExceeded as exc:
        _error(a, "budget", exc)
        return EXIT_BUDGET
    except InconclusiveError as exc:
        _error(a, "inconclusive", exc, exc.residuals)
        return EXIT_INCONCLUSIVE
    wall = (time.perf_counter() - t0) * 1000
    params = _params(a)
    params.pop("u_exact", None)
    doc = {"command": a.command, "params": fmt(params), **{k: fmt(v) for k, v in res.items() if k != "exact"},
           "exact": res["exact"], "manifest": _manifest(a, argv, wall, budget)}
    doc["manifest"]["params"].pop("u_exact", None)
    _emit(json.dumps(doc, indent=2) + "\n", a.out)
    if a.command == "selftest" and res["value"] != res["details"]["total"]:
        return EXIT_SELFTEST
    return 0


def _error(a, kind, exc, residuals=None):
    doc = {"command": a.command, "error": kind, "message": str(exc), "residuals": fmt(residuals or {})}
    sys.stderr.write(json.dumps(doc) + "\n")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
