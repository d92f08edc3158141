"""Symbolic dynamics for the beta-transformation and the Gauss map.

Beta cylinders are tracked through their image length ``ell``: the n-th
iterate of the map sends the cylinder of ``w`` affinely onto ``[0, ell)``.
A digit ``j`` may follow ``w`` iff ``j / beta < ell`` and the child's image
length is ``min(1, beta * ell - j)``.  A cylinder is full iff ``ell == 1``.

Continued-fraction cylinders are exact: convergents are Python integers and
endpoints are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import BudgetExceeded, DomainError, resolve_budget

LD = np.longdouble
LD_EPS = float(np.finfo(np.longdouble).eps)
GOLDEN = "golden"


# ---------------------------------------------------------------------------
# beta-transformation
# ---------------------------------------------------------------------------

def _to_longdouble(value) -> np.longdouble:
    if isinstance(value, str):
        return LD(value)
    if isinstance(value, mpmath.mpf):
        return LD(mpmath.nstr(value, 30, strip_zeros=False))
    if isinstance(value, Fraction):
        return LD(value.numerator) / LD(value.denominator)
    return LD(value)


@dataclass(frozen=True)
class BetaSystem:
    """The map ``x -> beta * x mod 1`` on ``[0, 1)``.

    ``beta`` is held in x87 extended precision (64-bit significand).
    ``guard_factor`` scales the tolerance used for the ``ell == 1`` test.
    """

    beta: np.longdouble
    guard_factor: float = 64.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "beta", _to_longdouble(self.beta))
        if not self.beta > 1:
            raise DomainError(f"beta must exceed 1, got {self.beta}")

    @classmethod
    def golden(cls, **kw) -> "BetaSystem":
        with mpmath.workprec(128):
            phi = (1 + mpmath.sqrt(5)) / 2
        return cls(phi, name=GOLDEN, **kw)

    @classmethod
    def parse(cls, text) -> "BetaSystem":
        """Build from ``"golden"``, a decimal string, or a number."""
        if isinstance(text, BetaSystem):
            return text
        if isinstance(text, str) and text.strip().lower() in (GOLDEN, "phi"):
            return cls.golden()
        return cls(text)

    @property
    def max_digit(self) -> int:
        return int(math.ceil(self.beta)) - 1

    @property
    def is_integer(self) -> bool:
        return self.beta == np.floor(self.beta)

    @property
    def log_beta(self) -> float:
        return float(np.log(self.beta))

    def guard(self, level: int) -> float:
        # ell values are affine iterates; rounding error grows like beta**level
        return self.guard_factor * LD_EPS * max(1.0, float(self.beta) ** level)

    def __repr__(self):
        label = self.name or repr(float(self.beta))
        return f"BetaSystem({label})"


@dataclass(frozen=True)
class BetaCylinder:
    """Level-n beta cylinder ``[left, left + beta**-n * image_len)``."""

    word: tuple
    left: np.longdouble
    image_len: np.longdouble
    is_full: bool
    beta: np.longdouble = field(repr=False)

    @property
    def level(self) -> int:
        return len(self.word)

    @property
    def length(self) -> np.longdouble:
        return self.beta ** (-self.level) * self.image_len

    @property
    def right(self) -> np.longdouble:
        return self.left + self.length

    @property
    def interval(self) -> tuple:
        return (self.left, self.right)

    def contains(self, x) -> bool:
        x = _to_longdouble(x)
        return bool(self.left <= x < self.right)


def root_cylinder(system: BetaSystem) -> BetaCylinder:
    return BetaCylinder((), LD(0), LD(1), True, system.beta)


def beta_digits(x, system: BetaSystem, n: int) -> tuple:
    """First ``n`` greedy digits of ``x`` under the beta-transformation."""
    if n < 1:
        raise DomainError("n must be positive")
    y = _to_longdouble(x)
    if not (0 <= y < 1):
        raise DomainError(f"x must lie in [0, 1), got {x}")
    beta = system.beta
    digits = []
    for _ in range(n):
        by = beta * y
        d = min(int(np.floor(by)), system.max_digit)
        digits.append(d)
        y = by - d
    return tuple(digits)


def beta_children(c: BetaCylinder, system: BetaSystem) -> list:
    """Admissible one-digit extensions of ``c`` in increasing digit order."""
    beta = system.beta
    n = c.level
    guard = system.guard(n + 1)
    scale = beta ** (-(n + 1))
    out = []
    for j in range(system.max_digit + 1):
        rest = beta * c.image_len - j
        if rest <= guard:
            break
        full = rest >= 1 - guard
        ell = LD(1) if full else rest
        out.append(BetaCylinder(c.word + (j,), c.left + j * scale, ell, bool(full), beta))
    return out


def _check_beta_budget(system: BetaSystem, n: int, budget):
    budget = resolve_budget(budget)
    b = float(system.beta)
    # #admissible words of length k is at most beta**(k+1) / (beta - 1)
    estimate = b ** (n + 2) / (b - 1) ** 2 if b > 1.0001 else float("inf")
    estimate = min(estimate, sum((system.max_digit + 1) ** k for k in range(n + 1)))
    if estimate > budget:
        raise BudgetExceeded(f"beta enumeration to level {n}", estimate, budget)
    return budget


@dataclass
class BetaLevel:
    """All cylinders of one level held as parallel arrays (lexicographic order)."""

    words: np.ndarray          # (N, n) digits
    left: np.ndarray           # longdouble
    ell: np.ndarray            # longdouble image lengths
    full: np.ndarray           # bool
    beta: np.longdouble

    @property
    def level(self) -> int:
        return self.words.shape[1]

    def __len__(self):
        return self.words.shape[0]

    @property
    def lengths(self) -> np.ndarray:
        return self.ell * self.beta ** (-self.level)

    def select(self, mask) -> "BetaLevel":
        return BetaLevel(self.words[mask], self.left[mask], self.ell[mask], self.full[mask], self.beta)

    def cylinders(self) -> list:
        return [BetaCylinder(tuple(int(d) for d in w), l, e, bool(f), self.beta)
                for w, l, e, f in zip(self.words, self.left, self.ell, self.full)]


def _root_level(system: BetaSystem) -> BetaLevel:
    dtype = np.uint8 if system.max_digit < 256 else np.int64
    return BetaLevel(np.zeros((1, 0), dtype=dtype), np.array([0], dtype=LD),
                     np.array([1], dtype=LD), np.array([True]), system.beta)


def _expand(level: BetaLevel, system: BetaSystem, stop_at_full=False) -> BetaLevel:
    """Vectorised child step; with ``stop_at_full`` full non-root nodes are not expanded."""
    beta = system.beta
    k = level.level
    parents = np.arange(len(level))
    if stop_at_full and k > 0:
        parents = parents[~level.full]
    guard = system.guard(k + 1)
    scale = beta ** (-(k + 1))
    idx, digit, ell = [], [], []
    for j in range(system.max_digit + 1):
        rest = beta * level.ell[parents] - j
        ok = rest > guard
        if not ok.any():
            break
        idx.append(parents[ok])
        digit.append(np.full(int(ok.sum()), j, dtype=level.words.dtype))
        ell.append(rest[ok])
    idx = np.concatenate(idx)
    digit = np.concatenate(digit)
    ell = np.concatenate(ell)
    order = np.lexsort((digit, idx))
    idx, digit, ell = idx[order], digit[order], ell[order]
    full = ell >= 1 - guard
    ell = np.where(full, LD(1), ell)
    words = np.concatenate([level.words[idx], digit[:, None]], axis=1)
    left = level.left[idx] + digit.astype(LD) * scale
    return BetaLevel(words, left, ell, full, beta)


def walk_beta(system: BetaSystem, n: int, budget=None) -> list:
    """Levels ``0..n`` of the admissible-word tree as :class:`BetaLevel` arrays."""
    budget = _check_beta_budget(system, n, budget)
    levels = [_root_level(system)]
    visited = 1
    for _ in range(n):
        levels.append(_expand(levels[-1], system))
        visited += len(levels[-1])
        if visited > budget:
            raise BudgetExceeded(f"beta enumeration to level {n}", visited, budget)
    return levels


def beta_level(system: BetaSystem, n: int, budget=None) -> BetaLevel:
    return walk_beta(system, n, budget)[-1]


def enumerate_beta_words(system: BetaSystem, n: int, full_only: bool = False,
                         budget=None) -> list:
    """Every admissible level-``n`` cylinder (or only the full ones)."""
    if n < 1:
        raise DomainError("n must be positive")
    lev = beta_level(system, n, budget)
    if full_only:
        lev = lev.select(lev.full)
    return lev.cylinders()


def first_return_words(system: BetaSystem, n: int, budget=None) -> list:
    """Full words of length ``<= n`` none of whose proper nonempty prefixes is full.

    Every full word factors uniquely into such words, so they generate the
    full words freely.  Returns one :class:`BetaLevel` per length ``1..n``.
    """
    budget = _check_beta_budget(system, n, budget)
    out = []
    frontier = _root_level(system)
    visited = 1
    for _ in range(n):
        if len(frontier) == 0:
            break
        children = _expand(frontier, system)
        visited += len(children)
        if visited > budget:
            raise BudgetExceeded(f"first-return words to level {n}", visited, budget)
        out.append(children.select(children.full))
        frontier = children.select(~children.full)
        if len(frontier) == 0:
            # nothing left to grow; pad with empty levels
            k = children.level
            while len(out) < n:
                k += 1
                empty = np.zeros((0, k), dtype=children.words.dtype)
                out.append(BetaLevel(empty, np.zeros(0, LD), np.zeros(0, LD),
                                     np.zeros(0, bool), system.beta))
            break
    return out


# ---------------------------------------------------------------------------
# Gauss map / continued fractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CfCylinder:
    """Continued-fraction cylinder ``I_n(a_1..a_n)`` with exact convergents.

    ``p_pair = (p_{n-1}, p_n)`` and ``q_pair = (q_{n-1}, q_n)``.  The
    endpoints are ``p_n/q_n`` and ``(p_n + p_{n-1})/(q_n + q_{n-1})``; which
    one is on the left depends on the parity of ``n``.
    """

    word: tuple
    p_pair: tuple
    q_pair: tuple

    @property
    def level(self) -> int:
        return len(self.word)

    @property
    def q(self) -> int:
        return self.q_pair[1]

    @property
    def endpoints(self) -> tuple:
        (p0, p1), (q0, q1) = self.p_pair, self.q_pair
        return (Fraction(p1, q1), Fraction(p1 + p0, q1 + q0))

    @property
    def interval(self) -> tuple:
        a, b = self.endpoints
        return (a, b) if a <= b else (b, a)

    @property
    def length(self) -> Fraction:
        q0, q1 = self.q_pair
        return Fraction(1, q1 * (q1 + q0))

    def child(self, a: int) -> "CfCylinder":
        if a < 1:
            raise DomainError(f"partial quotients must be >= 1, got {a}")
        (p0, p1), (q0, q1) = self.p_pair, self.q_pair
        return CfCylinder(self.word + (a,), (p1, a * p1 + p0), (q1, a * q1 + q0))

    def contains(self, x) -> bool:
        lo, hi = self.interval
        return lo <= x <= hi


CF_ROOT = CfCylinder((), (1, 0), (0, 1))


def convergent_sequence(word: Sequence[int]) -> list:
    """``[(p_1, q_1), ..., (p_n, q_n)]`` for the given partial quotients."""
    p0, p1, q0, q1 = 1, 0, 0, 1
    out = []
    for a in word:
        a = int(a)
        if a < 1:
            raise DomainError(f"partial quotients must be >= 1, got {a}")
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        out.append((p1, q1))
    return out


def cf_convergents(word: Sequence[int]) -> CfCylinder:
    c = CF_ROOT
    for a in word:
        c = c.child(int(a))
    return c


def cf_children(c: CfCylinder, digit_range: Iterable[int]) -> list:
    """Children of ``c`` for the given digits, in increasing digit order.

    For odd ``c.level`` they sit left to right as the digit grows, for even
    ``c.level`` right to left.
    """
    return [c.child(int(a)) for a in sorted(set(digit_range))]


@dataclass
class GaussOrbit:
    """Iterates ``G^k x`` with partial quotients ``a_{k+1}``.

    ``terminated`` is set when an iterate hit 0 before ``requested`` steps;
    ``steps`` then holds only the valid digits.
    """

    steps: list
    requested: int
    terminated: bool = False

    @property
    def digits(self) -> tuple:
        return tuple(d for _, d in self.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def gauss_orbit(x, n: int) -> GaussOrbit:
    """Run the Gauss map from ``x``.

    ``Fraction`` input is iterated exactly; anything else is converted to an
    ``mpmath.mpf`` at the current mpmath precision.
    """
    if n < 1:
        raise DomainError("n must be positive")
    exact = isinstance(x, (Fraction, int))
    y = Fraction(x) if exact else mpmath.mpf(x)
    if not (0 < y < 1):
        raise DomainError(f"x must lie in (0, 1), got {x}")
    steps = []
    for _ in range(n):
        if y == 0:
            return GaussOrbit(steps, n, terminated=True)
        inv = 1 / y
        a = int(math.floor(inv)) if exact else int(mpmath.floor(inv))
        steps.append((y, a))
        y = inv - a
    return GaussOrbit(steps, n)


@dataclass
class GaussLevel:
    """All words of one level over a finite alphabet, with convergent denominators."""

    words: np.ndarray      # (N, n) int64
    q: np.ndarray          # q_n   (float64)
    qprev: np.ndarray      # q_{n-1}
    alphabet: tuple

    @property
    def level(self) -> int:
        return self.words.shape[1]

    def __len__(self):
        return self.words.shape[0]

    @property
    def log_lengths(self) -> np.ndarray:
        return -np.log(self.q) - np.log(self.q + self.qprev)

    def cylinders(self) -> list:
        return [cf_convergents(w) for w in self.words.tolist()]


def gauss_level(alphabet: Sequence[int], n: int, budget=None) -> GaussLevel:
    """Every word in ``alphabet**n`` (lexicographic), with ``q_n`` and ``q_{n-1}``."""
    alphabet = tuple(sorted(set(int(a) for a in alphabet)))
    if not alphabet or alphabet[0] < 1:
        raise DomainError("alphabet must be nonempty positive integers")
    budget = resolve_budget(budget)
    count = len(alphabet) ** n
    if count > budget:
        raise BudgetExceeded(f"Gauss enumeration {len(alphabet)}^{n}", count, budget)
    digits = np.asarray(alphabet, dtype=np.int64)
    if n == 0:
        words = np.zeros((1, 0), dtype=np.int64)
    else:
        grids = np.meshgrid(*([digits] * n), indexing="ij")
        words = np.stack([g.ravel() for g in grids], axis=1)
    q0 = np.zeros(len(words))
    q1 = np.ones(len(words))
    for k in range(n):
        q0, q1 = q1, words[:, k] * q1 + q0
    return GaussLevel(words, q1, q0, alphabet)
