"""One-dimensional metric geometry: content, box counting, mass scans, separation, conformality."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InvariantViolation
from .symbolic import BetaSystem, CfCylinder, beta_level, cf_convergents, gauss_level
from .thermo.fmb import g_m
from .thermo.gibbs import gibbs_weights
from .thermo.potential import Potential

BRUTE_CAP = 20
DEFAULT_DP_CAP = 5000


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

@dataclass
class WeightedIntervalMeasure:
    """Disjoint intervals ``[a_i, b_i]`` carrying masses ``w_i`` with uniform density."""

    a: np.ndarray
    b: np.ndarray
    w: np.ndarray
    exact_masses: Optional[list] = None  # Fractions, when the masses are rational
    exact_endpoints: Optional[list] = None  # (Fraction, Fraction) pairs

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if not (self.a.shape == self.b.shape == self.w.shape) or self.a.ndim != 1:
            raise DomainError("endpoint and mass arrays must be 1-D of equal length")
        if len(self.a) == 0:
            raise DomainError("empty measure")
        if np.any(self.b <= self.a):
            raise DomainError("each component needs a < b")
        if np.any(self.w <= 0):
            raise DomainError("masses must be positive")
        order = np.argsort(self.a, kind="stable")
        if np.any(order != np.arange(len(order))):
            self.a, self.b, self.w = self.a[order], self.b[order], self.w[order]
            if self.exact_masses is not None:
                self.exact_masses = [self.exact_masses[i] for i in order]
            if self.exact_endpoints is not None:
                self.exact_endpoints = [self.exact_endpoints[i] for i in order]
        if np.any(self.a[1:] < self.b[:-1]):
            raise DomainError("components overlap")
        self._cum = np.concatenate([[0.0], np.cumsum(self.w)])

    @classmethod
    def from_components(cls, comps: Sequence, masses: Optional[Sequence] = None):
        comps = list(comps)
        a = [float(c[0]) for c in comps]
        b = [float(c[1]) for c in comps]
        w = [1.0 / len(comps)] * len(comps) if masses is None else [float(m) for m in masses]
        exact = [Fraction(m) for m in masses] if masses is not None and all(
            isinstance(m, (int, Fraction)) for m in masses) else None
        return cls(np.array(a), np.array(b), np.array(w), exact_masses=exact)

    @classmethod
    def lebesgue(cls):
        return cls(np.array([0.0]), np.array([1.0]), np.array([1.0]), exact_masses=[Fraction(1)])

    def __len__(self):
        return len(self.a)

    @property
    def total(self) -> float:
        return float(math.fsum(self.w))

    @property
    def exact_total(self) -> Optional[Fraction]:
        return None if self.exact_masses is None else sum(self.exact_masses, Fraction(0))

    @property
    def lengths(self) -> np.ndarray:
        return self.b - self.a

    @property
    def diameter(self) -> float:
        return float(self.b[-1] - self.a[0])

    def scaled(self, k: float) -> "WeightedIntervalMeasure":
        exact = None if self.exact_masses is None else [m * Fraction(k) for m in self.exact_masses]
        return WeightedIntervalMeasure(self.a, self.b, self.w * k, exact, self.exact_endpoints)

    def normalized(self) -> "WeightedIntervalMeasure":
        return self.scaled(1.0 / self.total)

    def cdf(self, x) -> np.ndarray:
        """``lambda((-inf, x])``."""
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(self.a, x, side="right") - 1
        kc = np.clip(k, 0, len(self.a) - 1)
        frac = np.clip((x - self.a[kc]) / (self.b[kc] - self.a[kc]), 0.0, 1.0)
        out = self._cum[kc] + self.w[kc] * frac
        return np.where(k < 0, 0.0, out)

    def measure(self, lo, hi) -> np.ndarray:
        """Mass of ``[lo, hi]`` (overlap fraction times mass, summed)."""
        return np.maximum(self.cdf(hi) - self.cdf(lo), 0.0)

    def ball(self, x, r) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = np.asarray(r, dtype=float)
        return self.measure(x - r, x + r)

    def intervals(self) -> list:
        return list(zip(self.a.tolist(), self.b.tolist()))


# ---------------------------------------------------------------------------
# Hausdorff content
# ---------------------------------------------------------------------------

@dataclass
class ContentEstimate:
    exponent: float
    value: float
    cover: list
    method: str

    @property
    def groups(self) -> int:
        return len(self.cover)


def _prepare_intervals(intervals) -> tuple:
    iv = [(float(a), float(b)) for a, b in intervals]
    if not iv:
        raise DomainError("empty interval list")
    for (a, b) in iv:
        if b < a:
            raise DomainError("interval with b < a")
    for (a0, b0), (a1, b1) in zip(iv, iv[1:]):
        if a1 < b0:
            raise DomainError("intervals must be sorted and disjoint")
    return np.array([a for a, _ in iv]), np.array([b for _, b in iv])


def _span_cost(left: float, right: float, s: float) -> float:
    # one scalar code path for dp and brute so their sums match bit for bit
    return (right - left) ** s


def _check_s(s: float):
    if not 0 < s <= 1:
        raise DomainError(f"content exponent must lie in (0, 1], got {s}")


def hausdorff_content_1d(intervals, s: float, method: str = "dp", cap: int = DEFAULT_DP_CAP) -> ContentEstimate:
    """Exact ``s``-dimensional Hausdorff content of a finite union of intervals.

    For ``s <= 1`` an optimal cover uses convex hulls of contiguous runs of
    components: merging two overlapping hulls never costs more, and a hull
    that skips a component can be extended to it for free.  ``dp`` solves
    ``best[i] = min_j best[j] + (b_{i-1} - a_j)^s`` in O(k^2); ``brute``
    enumerates all ``2^(k-1)`` contiguous partitions.  Both accumulate costs
    left to right, so they agree bit for bit.
    """
    _check_s(s)
    a, b = _prepare_intervals(intervals)
    a, b = a.tolist(), b.tolist()
    k = len(a)
    if method == "dp":
        if k > cap:
            raise DomainError(f"{k} components exceed the exact-mode cap {cap}")
        best = [0.0] + [math.inf] * k
        arg = [0] * (k + 1)
        for i in range(1, k + 1):
            for j in range(i):
                c = best[j] + _span_cost(a[j], b[i - 1], s)
                if c < best[i]:
                    best[i], arg[i] = c, j
        cuts = []
        i = k
        while i > 0:
            cuts.append((arg[i], i))
            i = arg[i]
        cover = [(float(a[j]), float(b[i - 1])) for j, i in reversed(cuts)]
        return ContentEstimate(s, best[k], cover, "dp")
    if method == "brute":
        if k > BRUTE_CAP:
            raise DomainError(f"brute force limited to {BRUTE_CAP} components")
        best, best_cover = math.inf, None
        for mask in range(1 << (k - 1)):
            cost, start, cover = 0.0, 0, []
            for i in range(1, k + 1):
                if i == k or (mask >> (i - 1)) & 1:
                    cost = cost + _span_cost(a[start], b[i - 1], s)
                    cover.append((float(a[start]), float(b[i - 1])))
                    start = i
            if cost < best:
                best, best_cover = cost, cover
        return ContentEstimate(s, best, best_cover, "brute")
    raise DomainError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# box counting
# ---------------------------------------------------------------------------

@dataclass
class BoxCountResult:
    slope: float
    intercept: float
    residual: float
    scales: np.ndarray
    counts: np.ndarray


def _box_count(a: np.ndarray, b: np.ndarray, delta: float) -> int:
    rel = 1e-9
    lo = np.floor(a / delta + rel).astype(np.int64)
    hi = np.maximum(np.ceil(b / delta - rel).astype(np.int64) - 1, lo)
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    # merge overlapping cell ranges
    count, cur_lo, cur_hi = 0, lo[0], hi[0]
    for l, h in zip(lo[1:], hi[1:]):
        if l > cur_hi:
            count += cur_hi - cur_lo + 1
            cur_lo, cur_hi = l, h
        else:
            cur_hi = max(cur_hi, h)
    return int(count + cur_hi - cur_lo + 1)


def box_count_dimension(intervals, scales=None) -> BoxCountResult:
    """Least-squares slope of ``log N(delta)`` against ``log(1/delta)``.

    Intervals may be degenerate (points).  ``scales`` needs at least four
    values spanning two decades.
    """
    a = np.array([float(x) for x, _ in intervals])
    b = np.array([float(y) for _, y in intervals])
    if len(a) == 0:
        raise DomainError("empty set")
    if scales is None:
        scales = np.logspace(-1, -4, 13)
    scales = np.asarray(scales, dtype=float)
    if len(scales) < 4 or np.any(scales <= 0) or np.log10(scales.max() / scales.min()) < 2 - 1e-12:
        raise DomainError("need >= 4 positive scales spanning >= 2 decades")
    counts = np.array([_box_count(a, b, d) for d in scales])
    x = np.log(1.0 / scales)
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return BoxCountResult(float(slope), float(intercept), resid, scales, counts)


# ---------------------------------------------------------------------------
# mass distribution scans
# ---------------------------------------------------------------------------

@dataclass
class MdpScan:
    c_est: float
    certificate: float
    center: float
    radius: float
    exponent: float
    candidates: int
    depth: int
    note: str = "lower bound valid up to scan resolution (finitely many balls tested)"


def _dyadic_balls(measure: WeightedIntervalMeasure, depth: int, max_balls: int = 2_000_000):
    centers, radii = [], []
    total = 0
    for k in range(1, depth + 1):
        pieces = 1 << k
        if total + pieces * len(measure) > max_balls:
            break
        step = measure.lengths[:, None] / pieces
        left = measure.a[:, None] + step * np.arange(pieces)[None, :]
        centers.append((left + step / 2).ravel())
        radii.append(np.broadcast_to(step / 2, left.shape).ravel())
        total += pieces * len(measure)
    if not centers:
        return np.empty(0), np.empty(0)
    return np.concatenate(centers), np.concatenate(radii)


def mdp_constant_scan(measure: WeightedIntervalMeasure, s: float, depth: int = 12) -> MdpScan:
    """``c_est = max lambda(B(x, r)) / r^s`` over candidate balls.

    Candidates are the balls spanned by every pair of component endpoints
    plus dyadic sub-balls of each component down to ``depth``.  The
    certificate ``1/c_est`` bounds the content of the support from below
    (the measure is normalized first).
    """
    if s <= 0:
        raise DomainError("s must be positive")
    mu = measure.normalized()
    ends = np.unique(np.concatenate([mu.a, mu.b]))
    i, j = np.triu_indices(len(ends), k=1)
    centers = 0.5 * (ends[i] + ends[j])
    radii = 0.5 * (ends[j] - ends[i])
    dc, dr = _dyadic_balls(mu, depth)
    centers = np.concatenate([centers, dc])
    radii = np.concatenate([radii, dr])
    ok = radii > 0
    centers, radii = centers[ok], radii[ok]
    ratio = mu.ball(centers, radii) / radii ** s
    k = int(np.argmax(ratio))
    c = float(ratio[k])
    return MdpScan(c, 1.0 / c, float(centers[k]), float(radii[k]), s, len(ratio), depth)


@dataclass
class HolderReport:
    exponent: float
    witness_center: float
    witness_radius: float
    max_ratio: float
    lemma_constant: float
    case1_ratio: float
    constant: float
    radii: np.ndarray
    profile: dict = field(default_factory=dict)


def holder_scan(measure: WeightedIntervalMeasure, u: float, q_n: int, B: float, n: int, m: int,
                constant: float = 64.0, n_radii: int = 40, u_grid=None) -> HolderReport:
    """Empirical Hölder exponent of ``measure`` against ``r^u' q_n^(2u') B^(n g_m(u))``.

    Balls are centred at component midpoints and endpoints with radii
    log-spaced from the smallest component length to the support diameter.
    Masses are taken relative to the total, so rescaling the measure changes
    nothing.  The exponent is the largest ``u'`` on the grid for which
    ``sup lambda(B(x,r)) / (r^u' q_n^(2u') B^(n g_m(u)))`` stays at most
    ``constant``.
    """
    if len(measure) == 0:
        raise DomainError("empty support")
    mu = measure.normalized()
    centers = np.unique(np.concatenate([mu.a, mu.b, 0.5 * (mu.a + mu.b)]))
    r_min = float(mu.lengths.min())
    r_max = max(mu.diameter, r_min * (1 + 1e-9))
    radii = np.logspace(np.log10(r_min), np.log10(r_max), n_radii)
    mass = mu.ball(centers[None, :], radii[:, None])  # (radii, centers)
    best_per_r = mass.max(axis=1)
    arg_c = mass.argmax(axis=1)
    log_scale = n * g_m(m, u) * math.log(B)
    lq2 = 2.0 * math.log(q_n)
    grid = np.round(np.arange(0.0, 1.0 + 1e-12, 0.005), 6) if u_grid is None else np.asarray(u_grid)

    def sup_ratio(up):
        logs = np.log(best_per_r) - up * (np.log(radii) + lq2) - log_scale
        k = int(np.argmax(logs))
        return float(np.exp(logs[k])), k

    profile = {}
    exponent, witness = float(grid[0]), 0
    for up in grid:
        val, k = sup_ratio(float(up))
        profile[float(up)] = val
        if val <= constant:
            exponent, witness = float(up), k
    lemma_c, _ = sup_ratio(u)
    top = radii[-1]
    case1 = float(1.0 / (top ** u * math.exp(u * lq2 + log_scale)))
    return HolderReport(exponent, float(centers[arg_c[witness]]), float(radii[witness]),
                        profile.get(exponent, sup_ratio(exponent)[0]), lemma_c, case1, constant,
                        radii, profile)


# ---------------------------------------------------------------------------
# separation of continued-fraction cylinders
# ---------------------------------------------------------------------------

@dataclass
class SeparationReport:
    passed: bool
    pairs: int
    violations: list
    min_gap: Fraction
    witness: tuple
    min_slack: Fraction  # min over pairs of gap / bound
    float_gap_ok: bool


def _first_difference(u: tuple, v: tuple) -> int:
    for i, (x, y) in enumerate(zip(u, v)):
        if x != y:
            return i
    return min(len(u), len(v))


def _float_gap_upper(lo_end: Fraction, hi_start: Fraction) -> float:
    """Outward-rounded float gap: an upper bound on ``hi_start - lo_end``."""
    up = math.nextafter(float(hi_start), math.inf)
    down = math.nextafter(float(lo_end), -math.inf)
    return up - down


def separation_check(cylinders: Sequence[CfCylinder], start: int = 0, factor: int = 32) -> SeparationReport:
    """Exact pairwise gaps against ``1 / (factor q_k^2)``.

    ``k`` is the first index (after ``start`` shared digits) where the words
    differ and ``q_k`` the denominator of that prefix; the smaller of the two
    prefixes' denominators is used, which gives the stricter bound.
    Overlapping or repeated cylinders raise :class:`InvariantViolation`.
    """
    cyls = list(cylinders)
    if len(cyls) < 2:
        return SeparationReport(True, 0, [], None, None, None, True)
    iv = [c.interval for c in cyls]
    order = sorted(range(len(cyls)), key=lambda i: iv[i][0])
    for x, y in zip(order, order[1:]):
        if iv[y][0] < iv[x][1] or cyls[x].word == cyls[y].word:
            raise InvariantViolation(f"cylinders {cyls[x].word} and {cyls[y].word} overlap")
    violations = []
    min_gap, witness, min_slack = None, None, None
    float_ok = True
    for i, j in itertools.combinations(range(len(cyls)), 2):
        wi, wj = cyls[i].word, cyls[j].word
        k = _first_difference(wi, wj)
        if k < start or k >= min(len(wi), len(wj)):
            raise InvariantViolation(f"{wi} and {wj} do not differ after the shared prefix")
        qi = cf_convergents(wi[:k + 1]).q
        qj = cf_convergents(wj[:k + 1]).q
        bound = Fraction(1, factor * min(qi, qj) ** 2)
        (a0, b0), (a1, b1) = iv[i], iv[j]
        lo_end, hi_start = (b0, a1) if b0 <= a1 else (b1, a0)
        gap = hi_start - lo_end
        if gap > _float_gap_upper(lo_end, hi_start):
            float_ok = False
        slack = gap / bound
        if gap < bound:
            violations.append((wi, wj, gap, bound))
        if min_gap is None or gap < min_gap:
            min_gap, witness = gap, (wi, wj)
        if min_slack is None or slack < min_slack:
            min_slack = slack
    n_pairs = len(cyls) * (len(cyls) - 1) // 2
    return SeparationReport(not violations, n_pairs, violations, min_gap, witness, min_slack, float_ok)


# ---------------------------------------------------------------------------
# quasi-self-conformality
# ---------------------------------------------------------------------------

@dataclass
class ConformalityReport:
    constant: float
    depth: int
    witnesses: list  # (word, ratio) with the most extreme ratios first
    geometric_constant: float
    words: int


def _prefix_marginal(words: np.ndarray, weights: np.ndarray, prefix: tuple) -> tuple:
    k = len(prefix)
    hit = np.all(words[:, :k] == np.asarray(prefix, dtype=words.dtype), axis=1) if k else \
        np.ones(len(words), dtype=bool)
    return hit, float(math.fsum(weights[hit]))


def quasi_conformality_check(system, potential: Potential, prefix: Sequence[int], depth: int,
                             digit_cap: int = 8, budget=None) -> ConformalityReport:
    """Compare the rescaled restriction of level-n weights to ``F`` with the weights themselves.

    ``system`` is a :class:`BetaSystem` (``F`` must be full) or ``"gauss"``
    (alphabet ``1..digit_cap``).  For every depth-``d`` word ``w`` the ratio
    ``(W(F w) / W(F)) / W(w)`` is formed from normalized Gibbs weights at
    levels ``|F| + d`` and ``d``; the constant is the largest of the ratios
    and their reciprocals.  The geometric constant compares
    ``|I(F w)| / |I(F)|`` with ``|I(w)|`` the same way.
    """
    prefix = tuple(int(d) for d in prefix)
    k = len(prefix)
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if isinstance(system, BetaSystem):
        lev_f = beta_level(system, k, budget) if k else None
        if k:
            hit = np.all(lev_f.words == np.asarray(prefix, dtype=lev_f.words.dtype), axis=1)
            if not hit.any():
                raise DomainError(f"{prefix} is not admissible")
            if not lev_f.full[hit][0]:
                raise DomainError(f"{prefix} is not a full cylinder")
        big = gibbs_weights(system, potential, k + depth, budget=budget)
        small = gibbs_weights(system, potential, depth, budget=budget)
        big_lev = beta_level(system, k + depth, budget)
        small_lev = beta_level(system, depth, budget)
        big_len = big_lev.lengths.astype(float)
        small_len = small_lev.lengths.astype(float)
        f_len = float(system.beta) ** (-k)
    elif system == "gauss":
        if any(not 1 <= a <= digit_cap for a in prefix):
            raise DomainError(f"prefix digits must lie in 1..{digit_cap}")
        big = gibbs_weights("gauss", potential, k + depth, digit_cap=digit_cap, budget=budget)
        small = gibbs_weights("gauss", potential, depth, digit_cap=digit_cap, budget=budget)
        big_lev = gauss_level(range(1, digit_cap + 1), k + depth, budget)
        small_lev = gauss_level(range(1, digit_cap + 1), depth, budget)
        big_len = np.exp(big_lev.log_lengths)
        small_len = np.exp(small_lev.log_lengths)
        f_len = float(cf_convergents(prefix).length) if k else 1.0
    else:
        raise DomainError(f"unknown system {system!r}")

    hit, wf = _prefix_marginal(big.words, big.weights, prefix)
    if wf <= 0:
        raise DomainError(f"{prefix} carries no weight")
    # index the small level by word
    index = {tuple(w): i for i, w in enumerate(small.words.tolist())}
    ratios, geo, words = [], [], []
    for row in np.flatnonzero(hit):
        tail = tuple(big.words[row, k:].tolist())
        i = index.get(tail)
        if i is None:
            continue
        ratios.append((big.weights[row] / wf) / small.weights[i])
        geo.append((big_len[row] / f_len) / small_len[i])
        words.append(tail)
    ratios = np.array(ratios)
    geo = np.array(geo)
    sym = np.maximum(ratios, 1.0 / ratios)
    order = np.argsort(-sym)[:5]
    witnesses = [(words[i], float(ratios[i])) for i in order]
    return ConformalityReport(float(sym.max()), depth, witnesses,
                              float(np.maximum(geo, 1.0 / geo).max()), len(words))
