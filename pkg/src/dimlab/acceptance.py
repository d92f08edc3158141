"""Acceptance checks, shared by the test suite and ``dimlab selftest``.

Each check returns a :class:`CheckResult`; none of them raise on a failed
threshold, so a report always covers every item.
"""
from __future__ import annotations

import functools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constructions import (TargetSpec, fmb_cantor, lambda_measure, natural_cover_exponent,
                            shrinking_target_interval)
from .geometry import (WeightedIntervalMeasure, hausdorff_content_1d, holder_scan,
                       mdp_constant_scan, quasi_conformality_check)
from .symbolic import BetaSystem, beta_level
from .thermo import (Potential, cascade_residuals, gibbs_weights, hdim_gibbs, pressure_beta,
                     solve_dimension_beta, solve_dimension_gauss, solve_fmb)

LOG_GOLDEN = math.log((1 + math.sqrt(5)) / 2)
E2_REFERENCE = 0.5312805  # Hausdorff dimension of E_2, literature value
FMB_CAP, FMB_LEVEL = 400, 2


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f}s)"


@functools.lru_cache(maxsize=None)
def _fmb(m: int, B: float):
    return solve_fmb(m, B, digit_cap=FMB_CAP, n=FMB_LEVEL)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def check_closed_form_beta() -> CheckResult:
    b2 = BetaSystem.parse("2")
    res, dt = _timed(lambda: solve_dimension_beta(Potential.constant(math.log(2)), b2, tol=1e-9, n=12))
    ok = abs(res.value - 0.5) <= 1e-6 and dt < 1.0
    return CheckResult(1, "closed-form beta dimension", ok,
                       f"s = {res.value:.12f}, bracket {res.bracket}, level 12", dt)


def check_golden_entropy() -> CheckResult:
    g = BetaSystem.golden()
    br, dt = _timed(lambda: pressure_beta(Potential(), g, 25))
    ok = br.lower <= LOG_GOLDEN <= br.upper and br.width <= 1e-2 and dt < 10
    return CheckResult(2, "golden-mean entropy bracket", ok,
                       f"[{br.lower:.6f}, {br.upper:.6f}] width {br.width:.4g} vs log phi {LOG_GOLDEN:.6f}", dt)


def check_gauss_sanity() -> CheckResult:
    res, dt = _timed(lambda: solve_dimension_gauss(Potential(), digit_cap=2000, n=2, tol=1e-9))
    ok = abs(res.value - 1.0) <= 5e-3
    return CheckResult(3, "Gauss sanity root", ok,
                       f"t = {res.value:.6f}, bracket ({res.bracket[0]:.4f}, {res.bracket[1]:.4f})", dt)


def check_fmb_consistency() -> CheckResult:
    t0 = time.perf_counter()
    diffs = {}
    for B in (2.0, 10.0):
        a = _fmb(1, B).value
        b = solve_dimension_gauss(Potential.constant(math.log(B)), digit_cap=FMB_CAP, n=FMB_LEVEL).value
        diffs[B] = abs(a - b)
    by_B = [_fmb(1, B).value for B in (1.5, 2.0, 4.0, 10.0, 100.0)]
    by_m = [_fmb(m, 2.0).value for m in (1, 2, 3, 5)]
    dec = all(x > y for x, y in zip(by_B, by_B[1:]))
    nondec = all(x <= y for x, y in zip(by_m, by_m[1:]))
    ok = max(diffs.values()) < 1e-6 and dec and nondec
    detail = (f"max |fmb - gauss| = {max(diffs.values()):.2g}; u(B) = "
              + ", ".join(f"{v:.4f}" for v in by_B) + "; u(m) = " + ", ".join(f"{v:.4f}" for v in by_m))
    return CheckResult(4, "F_m(B) consistency and monotonicity", ok, detail, time.perf_counter() - t0,
                       {"by_B": by_B, "by_m": by_m})


def check_alpha_cascade() -> CheckResult:
    t0 = time.perf_counter()
    worst = 0.0
    for m in (2, 3, 5):
        for B in (2.0, math.e, 10.0):
            for u in np.round(np.arange(0.55, 0.951, 0.05), 2):
                r = cascade_residuals(m, B, float(u))
                worst = max(worst, r["alpha1"], r["chain"], r["product"])
    return CheckResult(5, "alpha-cascade identities", worst < 1e-10,
                       f"max relative error {worst:.3g}", time.perf_counter() - t0)


SEPARATION_CASES = ((2, 1, 2.0), (3, 2, 2.0), (2, 2, 10.0))


def check_separation() -> CheckResult:
    t0 = time.perf_counter()
    parts, ok = [], True
    for n, m, B in SEPARATION_CASES:
        u = _fmb(m, B).value
        stage = fmb_cantor(None, m, B, u, n)
        sep = stage.separation
        ok &= sep.passed and not sep.violations
        parts.append(f"(n={n},m={m},B={B:g}): {len(stage)} blocks, {sep.pairs} pairs, "
                     f"{len(sep.violations)} violations, min gap/bound {float(sep.min_slack):.3g}"
                     if sep.pairs else f"(n={n},m={m},B={B:g}): single block")
    return CheckResult(6, "separation of F_m(B) blocks", ok, "; ".join(parts), time.perf_counter() - t0)


def check_holder() -> CheckResult:
    t0 = time.perf_counter()
    u = _fmb(1, 2.0).value
    stage = fmb_cantor(None, 1, 2.0, u, 2)
    rep = holder_scan(lambda_measure(stage), u, stage.prefix.q, 2.0, 2, 1)
    dt = time.perf_counter() - t0
    ok = rep.exponent >= u - 0.1 and dt < 30
    return CheckResult(7, "Hölder exponent of lambda", ok,
                       f"empirical exponent {rep.exponent:.3f} vs u - 0.1 = {u - 0.1:.4f} "
                       f"(lemma constant {rep.lemma_constant:.3g})", dt)


def random_content_instance(rng: random.Random, max_k: int = 12):
    k = rng.randint(1, max_k)
    pts = sorted(rng.random() for _ in range(2 * k))
    return list(zip(pts[::2], pts[1::2])), rng.uniform(0.05, 1.0)


def check_content(instances: int = 200, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    mismatches = 0
    for _ in range(instances):
        iv, s = random_content_instance(rng)
        if hausdorff_content_1d(iv, s, "dp").value != hausdorff_content_1d(iv, s, "brute").value:
            mismatches += 1
    v = hausdorff_content_1d([(0.0, 0.1), (0.9, 1.0)], 0.5).value
    ok = mismatches == 0 and abs(v - 0.632456) <= 1e-6
    return CheckResult(8, "content dp = brute force", ok,
                       f"{mismatches}/{instances} mismatches; two-interval value {v:.9f}",
                       time.perf_counter() - t0)


def check_mdp() -> CheckResult:
    scan, dt = _timed(lambda: mdp_constant_scan(WeightedIntervalMeasure.lebesgue(), 1.0))
    ok = scan.c_est <= 2.05 and scan.certificate >= 0.49
    return CheckResult(9, "mass distribution round trip", ok,
                       f"c_est = {scan.c_est:.6g}, certificate {scan.certificate:.6g}", dt)


def sample_target_instances(count: int, seed: int, slope_fraction: float = 1.0):
    """Random interior instances: beta in {2, golden}, affine h with |c1| <= L < beta^n.

    ``L`` is drawn uniformly from ``[0, slope_fraction * beta^n)``.
    """
    rng = random.Random(seed)
    systems = [BetaSystem.parse("2"), BetaSystem.golden()]
    fulls = {}
    out = []
    while len(out) < count:
        system = systems[rng.randrange(2)]
        n = rng.randint(1, 8)
        key = (system.name, n)
        if key not in fulls:
            lev = beta_level(system, n)
            fulls[key] = lev.select(lev.full).cylinders()
        cyl = fulls[key][rng.randrange(len(fulls[key]))]
        bn = float(system.beta) ** n
        L = rng.uniform(0.0, slope_fraction * bn)
        c1 = rng.uniform(-L, L)
        spec = TargetSpec.affine(rng.uniform(0.0, 1.0), c1, L)
        r = rng.uniform(0.0, 1.0)
        if r == 0:
            continue
        iv = shrinking_target_interval(cyl, spec, r)
        if iv.boundary:
            continue
        out.append((system, n, spec, r, iv))
    return out


def sandwich_failures(instances) -> list:
    bad = []
    for system, n, spec, r, iv in instances:
        bn = float(system.beta) ** n
        if not (r / bn / 2 <= iv.radius <= 2 * r / bn):
            bad.append((system.name, n, spec.c1, bn, r, iv.radius))
    return bad


def check_target_sandwich(count: int = 1000, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    bad = sandwich_failures(sample_target_instances(count, seed))
    detail = f"{len(bad)}/{count} interior instances outside [r beta^-n / 2, 2 r beta^-n]"
    if bad:
        worst = max(bad, key=lambda b: b[2] / b[3])
        detail += (f"; every failure has c1 > beta^n / 2 (largest c1/beta^n = {worst[2] / worst[3]:.3f}),"
                   f" where the radius r/(beta^n - c1) exceeds 2 r beta^-n")
    return CheckResult(10, "target-interval sandwich", not bad, detail, time.perf_counter() - t0,
                       {"failures": bad})


def check_cover_exponent() -> CheckResult:
    t0 = time.perf_counter()
    b2 = BetaSystem.parse("2")
    parts, ok = [], True
    for k in (1, 2, 3):
        c = k * math.log(2)
        f = Potential.constant(c)
        exact = math.log(2) / (c + math.log(2))
        ce = natural_cover_exponent(b2, f, 12, tol=1e-9)
        dim = solve_dimension_beta(f, b2, tol=1e-9)
        close = abs(ce.value - exact) <= 1e-3
        slack = 0.5 * ((ce.bracket[1] - ce.bracket[0]) + dim.width) + 1e-12
        agree = abs(ce.value - dim.value) <= slack
        ok &= close and agree
        parts.append(f"c=log{2 ** k}: {ce.value:.9f} vs {exact:.9f}, dim {dim.value:.9f}")
    return CheckResult(11, "cover exponent agreement", ok, "; ".join(parts), time.perf_counter() - t0)


def check_e2() -> CheckResult:
    res, dt = _timed(lambda: solve_dimension_gauss(Potential(), alphabet=(1, 2), n=14, tol=1e-7))
    lo, hi = res.bracket
    ok = (0.526 <= res.value <= 0.536 and 0.526 <= lo and hi <= 0.536
          and lo <= E2_REFERENCE <= hi and dt < 60)
    return CheckResult(12, "dimension of E_2", ok,
                       f"value {res.value:.7f}, certified [{lo:.6f}, {hi:.6f}], reference {E2_REFERENCE}", dt)


def check_gibbs_identity() -> CheckResult:
    b2 = BetaSystem.parse("2")
    s = 0.5
    phi = (Potential.constant(math.log(2)) + Potential.log_beta(b2)) * (-s)
    (h, d), dt = _timed(lambda: hdim_gibbs(gibbs_weights(b2, phi, 10)))
    ok = abs(h - math.log(2)) <= 1e-6 and abs(d - 1.0) <= 1e-6
    return CheckResult(13, "Gibbs entropy and dimension", ok, f"h = {h:.12f}, dim = {d:.12f}", dt)


def check_conformality() -> CheckResult:
    t0 = time.perf_counter()
    b2, g = BetaSystem.parse("2"), BetaSystem.golden()
    flat = max(abs(quasi_conformality_check(b2, Potential.constant(-math.log(2)), F, d).constant - 1.0)
               for F in ((0,), (1, 0, 1)) for d in range(1, 7))
    gold = [quasi_conformality_check(g, Potential(), (0,), d).constant for d in range(3, 7)]
    gauss = [quasi_conformality_check("gauss", Potential.log_gauss_derivative() * -1.0, (1,), d).constant
             for d in range(3, 7)]

    def spread(v):
        return max(v) / min(v) - 1.0

    ok = flat <= 1e-10 and spread(gold) < 0.1 and spread(gauss) < 0.1
    detail = (f"beta=2 max |C-1| = {flat:.2g}; golden C(3..6) = "
              + ", ".join(f"{c:.4f}" for c in gold) + "; Gauss C(3..6) = "
              + ", ".join(f"{c:.4f}" for c in gauss))
    return CheckResult(14, "quasi-self-conformality", ok, detail, time.perf_counter() - t0)


CHECKS: list[Callable[[], CheckResult]] = [
    check_closed_form_beta, check_golden_entropy, check_gauss_sanity, check_fmb_consistency,
    check_alpha_cascade, check_separation, check_holder, check_content, check_mdp,
    check_target_sandwich, check_cover_exponent, check_e2, check_gibbs_identity, check_conformality,
]


def run_all(print_lines: bool = True) -> list:
    results = []
    for check in CHECKS:
        res = check()
        if print_lines:
            print(res.line(), flush=True)
        results.append(res)
    return results
