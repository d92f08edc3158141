"""Finite stages of the shrinking-target and F_m(B) constructions."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import mpmath
import numpy as np
from scipy.optimize import brentq

from .errors import BudgetExceeded, DomainError, InconclusiveError, resolve_budget
from .geometry import SeparationReport, WeightedIntervalMeasure, separation_check
from .symbolic import LD, BetaCylinder, BetaSystem, CfCylinder, cf_convergents, walk_beta
from .thermo.fmb import mp_log_alpha_cascade
from .thermo.potential import Potential, beta_level_sums


# ---------------------------------------------------------------------------
# shrinking targets in beta cylinders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TargetSpec:
    """Target ``h(x) = c0 + c1 x``; a constant point is ``c1 = 0``.

    ``lipschitz`` is the declared bound ``L`` with ``|c1| <= L``.
    """

    c0: float = 0.5
    c1: float = 0.0
    lipschitz: Optional[float] = None

    def __post_init__(self):
        if self.lipschitz is not None and abs(self.c1) > self.lipschitz:
            raise DomainError(f"|c1| = {abs(self.c1)} exceeds the declared Lipschitz bound {self.lipschitz}")

    @classmethod
    def point(cls, x0: float) -> "TargetSpec":
        return cls(float(x0), 0.0, 0.0)

    @classmethod
    def affine(cls, c0: float, c1: float, lipschitz: Optional[float] = None) -> "TargetSpec":
        return cls(float(c0), float(c1), abs(float(c1)) if lipschitz is None else float(lipschitz))

    @property
    def kind(self) -> str:
        return "point" if self.c1 == 0 else "affine"

    @property
    def L(self) -> float:
        return abs(self.c1) if self.lipschitz is None else self.lipschitz

    def __call__(self, x):
        return self.c0 + self.c1 * x


@dataclass
class TargetInterval:
    lo: float
    hi: float
    center: float
    radius: float
    log_length: float  # log of the unclipped length, finite even when it underflows
    boundary: bool
    level: int
    word: tuple

    @property
    def empty(self) -> bool:
        return not self.hi > self.lo

    @property
    def length(self) -> float:
        return max(self.hi - self.lo, 0.0)


def _solve_target(left, right, beta_n, k, spec: TargetSpec, r, log_r, n, word):
    slope = beta_n - LD(spec.c1)
    if slope <= 0:
        raise DomainError("need L < beta^n")
    center = (k + LD(spec.c0)) / slope
    radius = LD(r) / slope
    lo, hi = center - radius, center + radius
    clo, chi = max(lo, left), min(hi, right)
    boundary = bool(lo < left or hi > right)
    log_len = math.log(2.0) + log_r - math.log(float(slope)) if r > 0 or np.isfinite(log_r) else -math.inf
    if r <= 0:
        clo = chi = center
    return TargetInterval(float(clo), float(chi), float(center), float(radius), log_len,
                          boundary, n, tuple(word))


def shrinking_target_interval(cyl: BetaCylinder, spec: TargetSpec, r: float,
                              system: Optional[BetaSystem] = None) -> TargetInterval:
    """Solve ``|T^n x - h(x)| < r`` on a full cylinder.

    On the cylinder ``T^n x = beta^n x - K`` with ``K = beta^n left``, so the
    solution set is the interval centred at ``(K + c0) / (beta^n - c1)`` with
    radius ``r / (beta^n - c1)``, clipped to the cylinder (``boundary`` set).
    """
    if not cyl.is_full:
        raise DomainError(f"cylinder {cyl.word} is not full")
    if r < 0:
        raise DomainError("radius must be nonnegative")
    n = cyl.level
    beta_n = LD(cyl.beta) ** n
    if spec.L >= beta_n:
        raise DomainError(f"Lipschitz bound {spec.L} is not below beta^n = {float(beta_n)}")
    k = beta_n * LD(cyl.left)
    log_r = math.log(r) if r > 0 else -math.inf
    return _solve_target(LD(cyl.left), LD(cyl.right), beta_n, k, spec, r, log_r, n, cyl.word)


def w_stage(system: BetaSystem, f: Potential, N: int,
            spec: Union[TargetSpec, Callable[[int], TargetSpec], None] = None,
            budget=None) -> list:
    """Target slices inside every full cylinder of levels ``1..N``.

    The radius at level ``n`` is ``exp(-S_n f(midpoint))``; the target
    family defaults to the constant point 1/2.  Returns
    :class:`TargetInterval` records in level then lexicographic order.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    spec = TargetSpec.point(0.5) if spec is None else spec
    levels = walk_beta(system, N, budget)
    out = []
    for n in range(1, N + 1):
        lev = levels[n]
        full = lev.select(lev.full)
        if len(full) == 0:
            continue
        sn = beta_level_sums(f, full).point
        sp = spec(n) if callable(spec) and not isinstance(spec, TargetSpec) else spec
        beta_n = LD(system.beta) ** n
        if sp.L >= beta_n:
            raise DomainError(f"Lipschitz bound {sp.L} is not below beta^{n}")
        for word, left, s in zip(full.words, full.left, sn):
            r = math.exp(-float(s))
            right = left + beta_n ** -1
            out.append(_solve_target(left, right, beta_n, beta_n * left, sp, r, -float(s), n,
                                     tuple(int(d) for d in word)))
    return out


@dataclass
class CoverExponent:
    value: float
    bracket: tuple
    level: int
    rates: dict = field(default_factory=dict)


def natural_cover_exponent(system: BetaSystem, f: Potential, N: int, tol: float = 1e-9,
                           spec=None, budget=None) -> CoverExponent:
    """Threshold ``s`` where the level sums ``Z_n(s) = sum |target|^s`` stop growing.

    Uses the ratio of consecutive levels, ``log Z_N(s) - log Z_{N-1}(s) = 0``,
    which is exact for constant ``f`` (a single level carries a
    ``(1/N) log 2^s`` bias).
    """
    if N < 2:
        raise DomainError("N must be >= 2")
    stage = w_stage(system, f, N, spec, budget)
    top = np.array([t.log_length for t in stage if t.level == N])
    prev = np.array([t.log_length for t in stage if t.level == N - 1])
    if len(top) == 0 or len(prev) == 0:
        raise InconclusiveError("no full cylinders at the top levels")

    def rate(s):
        return float(np.logaddexp.reduce(s * top) - np.logaddexp.reduce(s * prev))

    grid = np.linspace(0.0, 2.0, 41)
    rates = np.array([rate(s) for s in grid])
    if np.any(np.diff(rates) > 1e-12):
        raise InconclusiveError("level-sum growth rate is not decreasing in s",
                                {"rates": rates.tolist()})
    if not rates[0] >= 0 >= rates[-1]:
        raise InconclusiveError("no threshold in [0, 2]", {"rate(0)": rates[0], "rate(2)": rates[-1]})
    if rates[0] == 0:
        root = 0.0
    else:
        root = brentq(rate, 0.0, 2.0, xtol=tol / 4, rtol=4 * np.finfo(float).eps)
    lo, hi = max(0.0, root - tol / 2), root + tol / 2
    return CoverExponent(root, (lo, hi), N, {"rate_lo": rate(lo), "rate_hi": rate(hi)})


# ---------------------------------------------------------------------------
# the F_m(B) Cantor stage
# ---------------------------------------------------------------------------

@dataclass
class CantorStage:
    prefix: CfCylinder
    m: int
    B: float
    u: float
    n: int
    blocks: list
    alphas: list
    windows: list  # (ceil alpha_i^n, floor 2 alpha_i^n)
    digits: list  # admissible even digits per slot
    separation: Optional[SeparationReport] = None

    def __len__(self):
        return len(self.blocks)


def _even_window(log_alpha, n: int) -> tuple:
    with mpmath.workdps(50):
        x = mpmath.exp(log_alpha * n)

        def snap(v):
            # integer powers such as (alpha = B = 2)^n land exactly on the window edge
            k = mpmath.nint(v)
            return k if abs(v - k) < mpmath.mpf(10) ** -30 else v

        lo = int(mpmath.ceil(snap(x)))
        hi = int(mpmath.floor(snap(2 * x)))
    first = lo + (lo % 2)
    return lo, hi, list(range(first, hi + 1, 2))


def fmb_cantor(prefix: Union[CfCylinder, Sequence[int], None], m: int, B: float, u: float,
               n: int, budget=None, verify: bool = True) -> CantorStage:
    """All level-``n+m`` cylinders below ``prefix`` whose extra digits are even
    and lie in ``[alpha_i^n, 2 alpha_i^n]``.

    ``prefix`` defaults to ``(1,) * n``.  Separation of the blocks is checked
    in exact arithmetic on construction.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if prefix is None:
        prefix = (1,) * n
    if not isinstance(prefix, CfCylinder):
        prefix = cf_convergents(tuple(prefix))
    if prefix.level != n:
        raise DomainError(f"prefix has level {prefix.level}, expected n = {n}")
    logs = mp_log_alpha_cascade(m, B, u)
    windows, digits = [], []
    for i, la in enumerate(logs, start=1):
        lo, hi, evens = _even_window(la, n)
        if not evens:
            raise DomainError(f"window [{lo}, {hi}] for alpha_{i}^n contains no even digit")
        windows.append((lo, hi))
        digits.append(evens)
    count = math.prod(len(d) for d in digits)
    budget = resolve_budget(budget)
    if count > budget:
        raise BudgetExceeded("fmb_cantor", count, budget)
    blocks = []
    for tail in itertools.product(*digits):
        c = prefix
        for a in tail:
            c = c.child(a)
        blocks.append(c)
    stage = CantorStage(prefix, int(m), float(B), float(u), int(n), blocks,
                        [float(mpmath.exp(v)) for v in logs], windows, digits)
    if verify:
        stage.separation = separation_check(blocks, start=n)
    return stage


def lambda_measure(stage: CantorStage) -> WeightedIntervalMeasure:
    """Uniform probability on the blocks: mass ``1/#blocks`` each, uniform density inside."""
    if not stage.blocks:
        raise DomainError("empty stage")
    k = len(stage.blocks)
    ends = [c.interval for c in stage.blocks]
    masses = [Fraction(1, k)] * k
    return WeightedIntervalMeasure(np.array([float(a) for a, _ in ends]),
                                   np.array([float(b) for _, b in ends]),
                                   np.full(k, 1.0 / k), exact_masses=masses, exact_endpoints=ends)
