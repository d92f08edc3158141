"""Roots of pressure equations with certified brackets.

Each equation is a decreasing family ``x -> P(phi_x)``.  Three curves are
solved: the rigorous lower bound (its root is a certified lower end), the
rigorous upper bound (certified upper end), and the point estimate (the
reported value, clipped into the bracket).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ..errors import DomainError, InconclusiveError
from ..symbolic import BetaSystem
from .potential import Potential
from .pressure import DEFAULT_MARGIN, BetaPressure, GaussPressure

Curve = Callable[[float], float]


@dataclass
class DimensionResult:
    value: float
    bracket: tuple
    residual_lower: float
    residual_upper: float
    equation: str
    level: int
    truncation: Optional[object] = None
    method: str = "cylinder-sum brackets + Brent"
    details: dict = field(default_factory=dict)

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]

    def __post_init__(self):
        lo, hi = self.bracket
        if not lo <= self.value <= hi:
            raise AssertionError(f"value {self.value} outside bracket {self.bracket}")


def bracket_root(f: Curve, a: float, b: float, tol: float = 1e-12) -> tuple:
    """Shrink ``[a, b]`` with ``f(a) >= 0 >= f(b)`` (f decreasing) to width ``<= tol``.

    Brent's method locates the root; the ends are then re-evaluated so the
    sign conditions hold for the returned ``(a, b, f(a), f(b))`` exactly as
    computed, not just up to the solver's tolerance.
    """
    fa, fb = f(a), f(b)
    if not (fa >= 0 >= fb):
        raise InconclusiveError(f"no sign change on [{a}, {b}]", {"f(a)": fa, "f(b)": fb})
    if fa == 0 or fb == 0:
        x = a if fa == 0 else b
        return x, x, 0.0, 0.0
    x = brentq(f, a, b, xtol=tol / 4, rtol=4 * np.finfo(float).eps)
    h = tol / 2
    left, right = max(a, x - h), min(b, x + h)
    fl, fr = f(left), f(right)
    # widen towards the original ends if rounding put the root outside
    while fl < 0:
        left, h = max(a, left - h), 2 * h
        fl = f(left)
    h = tol / 2
    while fr > 0:
        right, h = min(b, right + h), 2 * h
        fr = f(right)
    return left, right, fl, fr


def _expand_right(f: Curve, a: float, b: float, limit: float):
    """Move ``b`` right until ``f(b) <= 0`` (doubling the step), not past ``limit``."""
    step = max(b - a, 0.25)
    while f(b) > 0:
        if b >= limit:
            return None
        a, b = b, min(b + step, limit)
        step *= 2
    return a, b


def _solve_curves(lower: Curve, upper: Curve, estimate: Curve, lo_start: float,
                  hi_start: float, limit: float, tol: float, upper_floor: Optional[float] = None,
                  analytic_hi: Optional[float] = None, info: Optional[dict] = None):
    """Certified bracket from the lower/upper curves plus the estimate root.

    ``upper_floor`` is the smallest argument where ``upper`` may be called; if
    the upper curve is already negative there, that point is the certified end.
    ``analytic_hi`` is a point where the exact equation is known to be <= 0;
    it caps the upper end when the truncated upper curve is still positive there.
    """
    info = {} if info is None else info
    inner_tol = max(tol / 4, 1e-15)
    # certified lower end: root of the lower curve
    if lower(lo_start) < 0:
        raise InconclusiveError("lower pressure curve negative at the left end of the domain",
                                {"lower": lower(lo_start), "at": lo_start})
    span = _expand_right(lower, lo_start, hi_start, limit)
    if span is None:
        raise InconclusiveError("lower pressure curve has no root in the search domain",
                                {"lower": lower(limit), "at": limit})
    lo, _, res_lo, _ = bracket_root(lower, *span, tol=inner_tol)

    # certified upper end: root of the upper curve
    start = lo_start if upper_floor is None else max(lo_start, upper_floor)
    u_start = upper(start)
    if u_start <= 0:
        hi, res_hi = start, u_start
    elif analytic_hi is not None and upper(analytic_hi) > 0:
        hi, res_hi = analytic_hi, upper(analytic_hi)
        info["upper_end"] = "analytic"
    else:
        span = _expand_right(upper, start, max(hi_start, start + 1e-3), limit)
        if span is None:
            raise InconclusiveError("upper pressure curve has no root in the search domain",
                                    {"residual_lower": res_lo, "upper": upper(limit), "at": limit})
        _, hi, _, res_hi = bracket_root(upper, *span, tol=inner_tol)
    if hi < lo:  # only possible through rounding of two identical curves
        lo = hi = 0.5 * (lo + hi)

    # point estimate
    e_lo, e_hi = lo_start, limit
    try:
        fe_lo, fe_hi = estimate(e_lo), estimate(e_hi)
    except DomainError:
        fe_lo = fe_hi = np.nan
    if not (fe_lo >= 0 > fe_hi):
        raise InconclusiveError("point estimate does not change sign on the search domain",
                                {"residual_lower": res_lo, "residual_upper": res_hi,
                                 "estimate_left": fe_lo, "estimate_right": fe_hi})
    if fe_lo == 0:
        value = e_lo
    else:
        value = brentq(estimate, e_lo, e_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    value = min(max(value, lo), hi)
    return value, (lo, hi), res_lo, res_hi


# ---------------------------------------------------------------------------
# beta
# ---------------------------------------------------------------------------

def solve_dimension_beta(f: Potential, system: BetaSystem, tol: float = 1e-9, n: int = 12,
                         budget=None) -> DimensionResult:
    """Root ``s`` of ``P(-s (f + log beta), T_beta) = 0``.

    ``f`` must be nonnegative; ``f == 0`` is accepted as a boundary check
    (root 1).
    """
    if f.lgp:
        raise DomainError("f must be a bounded potential")
    if f.bounded_range()[0] < 0:
        raise DomainError("f must be nonnegative")
    if tol <= 0:
        raise DomainError("tol must be positive")
    bp = BetaPressure(system, n, budget)
    base = f + Potential.log_beta(system)

    def fam(s):
        return base * (-s)

    value, br, r_lo, r_hi = _solve_curves(
        lambda s: bp.lower(fam(s)), lambda s: bp.upper(fam(s)), lambda s: bp.estimate(fam(s)),
        0.0, 1.0, 64.0, tol)
    return DimensionResult(value, br, r_lo, r_hi, "beta", n,
                           details={"beta": float(system.beta), "words": len(bp.levels[-1])})


# ---------------------------------------------------------------------------
# Gauss
# ---------------------------------------------------------------------------

def _solve_gauss_family(fam: Callable[[float], Potential], gp: GaussPressure, tol: float,
                        t_max: float, equation: str, analytic_hi: Optional[float] = None) -> DimensionResult:
    if gp.capped:
        # the pressure of a capped system diverges as t -> 1/2; search (1/2, t_max]
        lo_start = 0.5 + 1e-9
        floor = 0.5 + gp.margin + 1e-12
    else:
        lo_start = 0.0
        floor = None
    hi_start = min(1.0, t_max)

    def lower(t):
        return gp.lower(fam(t))

    def upper(t):
        return gp.upper(fam(t))

    def estimate(t):
        return gp.estimate(fam(t))

    if gp.capped and lower(lo_start) < 0:
        # the true pressure is +inf at 1/2, so 1/2 itself is a certified lower end
        lower_curve = lambda t: 1.0 if t <= lo_start else lower(t)  # noqa: E731
    else:
        lower_curve = lower
    info = {}
    value, br, r_lo, r_hi = _solve_curves(lower_curve, upper, estimate, lo_start, hi_start,
                                          t_max, tol, upper_floor=floor, analytic_hi=analytic_hi,
                                          info=info)
    return DimensionResult(value, br, r_lo, r_hi, equation, gp.n, truncation=gp.truncation,
                           details={"words": len(gp.levels[-1]),
                                    "mass_deficit": gp.mass_deficit(fam(value)),
                                    "margin": gp.margin if gp.capped else None,
                                    "upper_end": info.get("upper_end", "upper curve")})


def solve_dimension_gauss(f: Potential, tol: float = 1e-9, digit_cap: Optional[int] = 2000,
                          n: int = 2, alphabet: Optional[Sequence[int]] = None, budget=None,
                          margin: float = DEFAULT_MARGIN, t_max: float = 8.0) -> DimensionResult:
    """Root ``t`` of ``P(-t (f + log|G'|), G) = 0``.

    With ``alphabet`` the Gauss map is restricted to those digits (for
    example ``(1, 2)`` gives the dimension of E_2) and ``digit_cap`` is
    ignored.
    """
    if f.lgp:
        raise DomainError("f must be a bounded potential (log|G'| is added automatically)")
    if f.bounded_range()[0] < 0:
        raise DomainError("f must be nonnegative")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if alphabet is not None:
        digit_cap = None
    gp = GaussPressure(n, digit_cap=digit_cap, alphabet=alphabet, budget=budget, margin=margin)
    base = f + Potential.log_gauss_derivative()
    # f >= 0 and P(-log|G'|) = 0 give P(-(f + log|G'|)) <= 0 at t = 1, also for subsystems
    return _solve_gauss_family(lambda t: base * (-t), gp, tol, t_max, "gauss", analytic_hi=1.0)


def aitken(values: Sequence[float]) -> float:
    """Aitken delta-squared extrapolation of the last three values (not rigorous)."""
    if len(values) < 3:
        raise DomainError("Aitken extrapolation needs three values")
    x0, x1, x2 = (float(v) for v in values[-3:])
    d = x2 - 2 * x1 + x0
    if d == 0:
        return x2
    return x2 - (x2 - x1) ** 2 / d
