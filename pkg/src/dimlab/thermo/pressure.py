"""Finite-level pressure brackets for the beta-transformation and the Gauss map.

Every bound here is a cylinder sum.  Upper bounds use ``sup S_n phi`` and are
valid at each level by submultiplicativity.  Lower bounds use ``inf S_n phi``
over words whose concatenations stay admissible (full words for beta, all
words for Gauss), so they are supermultiplicative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import zeta

from ..errors import DomainError
from ..symbolic import BetaSystem, GaussLevel, first_return_words, gauss_level, walk_beta
from .potential import (LevelSums, Potential, _suffix_lengths, beta_level_sums,
                        beta_orbit_midpoints, gauss_mean_value_orbit)

DEFAULT_MARGIN = 0.05
CW_WORK = 8 * 10**6  # (grid points) x (words) for the Collatz-Wielandt scan
CW_MIN_CELLS = 16  # below this the grid is too coarse to beat the Fekete bounds


@dataclass
class PressureBracket:
    level: int
    lower: float
    upper: float
    system: str
    estimate: float
    truncation: Optional[object] = None
    tail_bound: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


def _lse(x) -> float:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return -np.inf
    m = x.max()
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.sum(np.exp(x - m))))


def _lse_rows(x: np.ndarray) -> np.ndarray:
    m = x.max(axis=1)
    return m + np.log(np.sum(np.exp(x - m[:, None]), axis=1))


def _clip(x, lo, hi):
    return min(max(x, lo), hi)


# ---------------------------------------------------------------------------
# beta
# ---------------------------------------------------------------------------

class BetaPressure:
    """Cached level-``n`` cylinder data for repeated beta pressure evaluations."""

    def __init__(self, system: BetaSystem, n: int, budget=None):
        if n < 1:
            raise DomainError("level must be >= 1")
        self.system = system
        self.n = n
        self.levels = walk_beta(system, n, budget)
        self.returns = first_return_words(system, n, budget)
        self._orbits = {}

    def _sums(self, potential: Potential, lev, key) -> LevelSums:
        if potential.table is not None and key not in self._orbits:
            self._orbits[key] = beta_orbit_midpoints(lev)
        if potential.table is None:
            return beta_level_sums(potential, lev)
        # reuse cached orbit
        n = lev.level
        point = n * potential.const + potential.table(self._orbits[key]).sum(axis=1)
        beta = float(lev.beta)
        geom = sum(beta ** (k - n) for k in range(n))
        err = potential.table.lipschitz * 0.5 * geom * lev.ell.astype(float)
        return LevelSums(point, point - err, point + err)

    def upper(self, potential: Potential) -> float:
        s = self._sums(potential, self.levels[-1], ("lev", self.n))
        return _lse(s.hi) / self.n

    def lower_fekete(self, potential: Potential) -> float:
        lev = self.levels[-1]
        s = self._sums(potential, lev, ("lev", self.n))
        return _lse(s.lo[lev.full]) / self.n

    def lower_renewal(self, potential: Potential) -> float:
        """Root ``p`` of ``sum_v exp(inf S_|v| phi - p |v|) = 1`` over first-return words."""
        terms = []
        for k, lev in enumerate(self.returns, start=1):
            if len(lev):
                s = self._sums(potential, lev, ("ret", k))
                terms.append((k, s.lo))
        ks = np.concatenate([np.full(len(lo), k, dtype=float) for k, lo in terms])
        los = np.concatenate([lo for _, lo in terms])

        def g(p):
            return _lse(los - p * ks)

        # g decreases strictly in p; bracket the root from the largest term
        base = float(np.max(los / ks))
        a, b = base - 1.0, base + 1.0
        while g(a) < 0:
            a -= 2 * (b - a)
        while g(b) > 0:
            b += 2 * (b - a)
        return brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def lower(self, potential: Potential) -> float:
        return max(self.lower_fekete(potential), self.lower_renewal(potential))

    def estimate(self, potential: Potential) -> float:
        """Ratio estimate ``log(Z_n / Z_{n-1})`` at cylinder midpoints (not rigorous)."""
        zn = _lse(self._sums(potential, self.levels[-1], ("lev", self.n)).point)
        if self.n == 1:
            return zn
        zp = _lse(self._sums(potential, self.levels[-2], ("lev", self.n - 1)).point)
        return zn - zp

    def bracket(self, potential: Potential) -> PressureBracket:
        up = self.upper(potential)
        lf = self.lower_fekete(potential)
        lr = self.lower_renewal(potential)
        lo = max(lf, lr)
        est = _clip(self.estimate(potential), lo, up)
        return PressureBracket(self.n, lo, up, "beta", est,
                               details={"lower_fekete": lf, "lower_renewal": lr,
                                        "words": len(self.levels[-1]),
                                        "full_words": int(self.levels[-1].full.sum())})


def pressure_beta(potential: Potential, system: BetaSystem, n: int, budget=None) -> PressureBracket:
    """Rigorous bracket for ``P(phi, T_beta)`` from level-``n`` cylinder sums.

    ``upper`` is ``(1/n) log sum exp(sup S_n phi)`` over admissible words.
    ``lower`` is the larger of the full-word Fekete bound
    ``(1/n) log sum_full exp(inf S_n phi)`` and the first-return (renewal)
    bound, which is exact for constant potentials on simple beta-shifts.
    """
    return BetaPressure(system, n, budget).bracket(potential)


# ---------------------------------------------------------------------------
# Gauss
# ---------------------------------------------------------------------------

def tail_per_slot(digit_cap: int, t: float) -> float:
    """Upper bound ``sum_{a > A} a^{-2t} <= A^{1-2t} / (2t - 1)``."""
    return digit_cap ** (1.0 - 2.0 * t) / (2.0 * t - 1.0)


def _tail_multiplier(digit_cap: int, t: float) -> float:
    """Approximate ``sum_{a >= A} (a/A)^{-2t}``: weight multiplier for a capped slot."""
    return 1.0 + digit_cap ** (2.0 * t) * float(zeta(2.0 * t, digit_cap + 1))


class GaussPressure:
    """Cached level data for Gauss-map pressure at level ``n``.

    Either ``digit_cap`` (alphabet ``1..A`` standing in for all of N, with a
    tail bound) or a finite ``alphabet`` (a genuinely restricted system).
    """

    def __init__(self, n: int, digit_cap: Optional[int] = None,
                 alphabet: Optional[Sequence[int]] = None, budget=None,
                 margin: float = DEFAULT_MARGIN):
        if n < 1:
            raise DomainError("level must be >= 1")
        if (digit_cap is None) == (alphabet is None):
            raise DomainError("give exactly one of digit_cap or alphabet")
        self.n = n
        self.margin = margin
        self.capped = digit_cap is not None
        self.digit_cap = int(digit_cap) if self.capped else None
        if self.capped and self.digit_cap < 1:
            raise DomainError("digit cap must be >= 1")
        self.alphabet = tuple(range(1, self.digit_cap + 1)) if self.capped else tuple(sorted(set(alphabet)))
        self.levels = [gauss_level(self.alphabet, n, budget)]
        if n > 1:
            self.levels.insert(0, gauss_level(self.alphabet, n - 1, budget))
        self._cache = {}
        self._cw_memo = None

    @property
    def truncation(self):
        return self.digit_cap if self.capped else list(self.alphabet)

    # -- per-level arrays -------------------------------------------------------
    def _arrays(self, lev: GaussLevel):
        key = lev.level
        if key not in self._cache:
            lq = np.log(lev.q)
            lqq = np.log(lev.q + lev.qprev)
            cnt = (lev.words == self.digit_cap).sum(axis=1) if self.capped else None
            self._cache[key] = {"sup": 2 * lq, "inf": 2 * lqq, "mv": lq + lqq, "cnt": cnt}
        return self._cache[key]

    def _table_part(self, potential: Potential, lev: GaussLevel):
        key = ("table", lev.level)
        if key not in self._cache:
            self._cache[key] = (gauss_mean_value_orbit(lev), _suffix_lengths(lev).sum(axis=1))
        orbit, suffix = self._cache[key]
        return potential.table(orbit).sum(axis=1), potential.table.lipschitz * suffix

    def sums(self, potential: Potential, lev: GaussLevel) -> LevelSums:
        arr = self._arrays(lev)
        n = lev.level
        g = potential.lgp
        point = n * potential.const + g * arr["mv"]
        # 2 log q_n <= S_n log|G'| <= 2 log(q_n + q_{n-1}); the sign of g picks the ends
        small, big = (arr["sup"], arr["inf"]) if g >= 0 else (arr["inf"], arr["sup"])
        lo = n * potential.const + g * small
        hi = n * potential.const + g * big
        if potential.table is not None:
            s, err = self._table_part(potential, lev)
            point = point + s
            lo = lo + s - err
            hi = hi + s + err
        return LevelSums(point, lo, hi)

    def _exponent(self, potential: Potential) -> float:
        return -potential.lgp

    def _check_tail(self, potential: Potential):
        t = self._exponent(potential)
        if t <= 0.5 + self.margin:
            raise DomainError(
                f"tail bound needs exponent t > 1/2 + {self.margin} on log|G'| (got t={t:.6g}); "
                "the pressure diverges as t -> 1/2")
        return t

    def _tail_total(self, potential: Potential, n: int) -> float:
        """Bound on the sum of ``exp(sup S_n phi)`` over words with some digit > A."""
        if not self.capped or n == 0:
            return 0.0
        t = self._check_tail(potential)
        a = np.arange(1, self.digit_cap + 1, dtype=float)
        z = float(np.sum(a ** (-2.0 * t)))
        tau = tail_per_slot(self.digit_cap, t)
        bmax = potential.bounded_range()[1]
        return float(np.exp(n * bmax) * ((z + tau) ** n - z ** n))

    # -- bounds -----------------------------------------------------------------
    def upper_sup(self, potential: Potential) -> float:
        lev = self.levels[-1]
        s = self.sums(potential, lev)
        log_trunc = _lse(s.hi)
        tail = self._tail_total(potential, self.n)
        return float(np.logaddexp(log_trunc, np.log(tail)) if tail > 0 else log_trunc) / self.n

    def lower_fekete(self, potential: Potential) -> float:
        return _lse(self.sums(potential, self.levels[-1]).lo) / self.n

    def _cw_cells(self) -> int:
        work = max(len(lv) for lv in self.levels)
        return int(min(1024, CW_WORK // max(work, 1)))

    def _cw_applicable(self, potential: Potential) -> bool:
        if potential.table is not None or potential.lgp >= 0:
            return False
        if self.capped and self._exponent(potential) <= 0.5 + self.margin:
            return False
        return self._cw_cells() >= CW_MIN_CELLS

    def _cw_logs(self, lev: GaussLevel) -> np.ndarray:
        """``log(q_n + q_{n-1} y)`` on the Collatz-Wielandt grid, cached per level."""
        key = ("cw", lev.level)
        if key not in self._cache:
            ys = np.linspace(0.0, 1.0, self._cw_cells() + 1)
            self._cache[key] = np.log(lev.q[None, :] + lev.qprev[None, :] * ys[:, None])
        return self._cache[key]

    def _log_operator(self, potential: Potential, lev: GaussLevel) -> np.ndarray:
        """``log L^n 1(y)`` restricted to the alphabet, on the grid."""
        if lev.level == 0:
            return np.zeros(self._cw_cells() + 1)
        return lev.level * potential.const + _lse_rows(2.0 * potential.lgp * self._cw_logs(lev))

    def collatz_wielandt(self, potential: Potential) -> tuple:
        """Bounds ``inf_y R(y) <= e^P <= sup_y R(y)``, ``R = L^n 1 / L^{n-1} 1``.

        Both ``L^k 1`` are decreasing in ``y`` so each grid cell is bounded by
        its endpoint values.  Only for potentials ``c + lgp log|G'|``.
        """
        key = (potential.const, potential.lgp)
        if self._cw_memo is not None and self._cw_memo[0] == key:
            return self._cw_memo[1]
        num = self._log_operator(potential, self.levels[-1])
        if self.n == 1:
            den = np.zeros(len(num))
        else:
            den = self._log_operator(potential, self.levels[0])
        tn = self._tail_total(potential, self.n)
        tp = self._tail_total(potential, self.n - 1)
        num_hi = np.logaddexp(num, np.log(tn)) if tn > 0 else num
        den_hi = np.logaddexp(den, np.log(tp)) if tp > 0 else den
        upper = float(np.max(num_hi[:-1] - den[1:]))
        lower = float(np.min(num[1:] - den_hi[:-1]))
        # one-entry memo: lower() and upper() at the same argument share the scan
        self._cw_memo = (key, (lower, upper))
        return lower, upper

    def upper(self, potential: Potential) -> float:
        up = self.upper_sup(potential)
        if self._cw_applicable(potential):
            up = min(up, self.collatz_wielandt(potential)[1])
        return up

    def lower(self, potential: Potential) -> float:
        lo = self.lower_fekete(potential)
        if self._cw_applicable(potential):
            lo = max(lo, self.collatz_wielandt(potential)[0])
        return lo

    def _log_z(self, potential: Potential, lev: GaussLevel, corrected: bool) -> float:
        if lev.level == 0:
            return 0.0
        s = self.sums(potential, lev).point
        if corrected and self.capped:
            t = self._exponent(potential)
            if t <= 0.5:
                return np.inf
            cnt = self._arrays(lev)["cnt"]
            s = s + cnt * np.log(_tail_multiplier(self.digit_cap, t))
        return _lse(s)

    def estimate(self, potential: Potential, corrected: bool = True) -> float:
        """Ratio estimate ``log(Z_n / Z_{n-1})`` at mean-value points (not rigorous).

        With a digit cap the capped slot is inflated by the Hurwitz-zeta tail
        ``sum_{a >= A} (a/A)^{-2t}``; without correction this is the plain
        truncated sum.
        """
        zn = self._log_z(potential, self.levels[-1], corrected)
        zp = self._log_z(potential, self.levels[0], corrected) if self.n > 1 else 0.0
        return zn - zp

    def mass_deficit(self, potential: Potential) -> float:
        """Fraction of the (tail-corrected) level-n sum lost to the digit cap."""
        if not self.capped:
            return 0.0
        raw = self._log_z(potential, self.levels[-1], False)
        cor = self._log_z(potential, self.levels[-1], True)
        return float(-np.expm1(raw - cor)) if np.isfinite(cor) else 1.0

    def bracket(self, potential: Potential) -> PressureBracket:
        details = {"words": len(self.levels[-1])}
        up_sup = self.upper_sup(potential)
        lo_f = self.lower_fekete(potential)
        up, lo = up_sup, lo_f
        details.update(upper_sup=up_sup, lower_fekete=lo_f)
        if self._cw_applicable(potential):
            cw_lo, cw_up = self.collatz_wielandt(potential)
            details.update(cw_lower=cw_lo, cw_upper=cw_up, cw_cells=self._cw_cells())
            up, lo = min(up, cw_up), max(lo, cw_lo)
        raw = self.estimate(potential, corrected=False)
        est = self.estimate(potential, corrected=True)
        details.update(estimate_truncated=raw, mass_deficit=self.mass_deficit(potential))
        tail = tail_per_slot(self.digit_cap, self._exponent(potential)) if self.capped else 0.0
        return PressureBracket(self.n, lo, up, "gauss", _clip(est, lo, up),
                               truncation=self.truncation, tail_bound=tail, details=details)


def pressure_gauss(potential: Potential, n: int, digit_cap: Optional[int] = None,
                   alphabet: Optional[Sequence[int]] = None, budget=None,
                   margin: float = DEFAULT_MARGIN) -> PressureBracket:
    """Bracket for ``P(phi, G)`` from level-``n`` cylinder sums.

    With ``digit_cap`` the infinite alphabet is truncated to ``1..A`` and the
    upper bound adds the tail ``A^{1-2t}/(2t-1)`` per slot, which requires the
    coefficient on ``log|G'|`` to be ``-t`` with ``t > 1/2 + margin``.  With a
    finite ``alphabet`` the bracket is for the restricted system and no tail
    is needed.
    """
    if digit_cap is None and alphabet is None:
        raise DomainError("give digit_cap or alphabet")
    gp = GaussPressure(n, digit_cap=digit_cap, alphabet=alphabet, budget=budget, margin=margin)
    if gp.capped:
        gp._check_tail(potential)
    return gp.bracket(potential)
