"""Potentials and Birkhoff sums on cylinders.

A potential is ``const + table(x) + lgp * log|G'(x)|`` where ``table`` is an
optional piecewise-linear function on a grid of ``[0, 1]`` with a declared
Lipschitz constant.  That covers constants, ``log beta``, tabulated ``f``,
and every combination ``-t (f + log|G'|) + c`` the dimension equations need.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DomainError
from ..symbolic import LD, BetaCylinder, BetaLevel, BetaSystem, CfCylinder, GaussLevel


@dataclass(frozen=True)
class Table:
    grid: np.ndarray
    values: np.ndarray
    lipschitz: float

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.grid, self.values)

    def scaled(self, k: float) -> "Table":
        return Table(self.grid, self.values * k, abs(k) * self.lipschitz)

    def __add__(self, other: "Table") -> "Table":
        if self.grid.shape != other.grid.shape or not np.array_equal(self.grid, other.grid):
            raise DomainError("tabulated potentials must share a grid to be added")
        return Table(self.grid, self.values + other.values, self.lipschitz + other.lipschitz)


@dataclass(frozen=True)
class Potential:
    const: float = 0.0
    lgp: float = 0.0
    table: Optional[Table] = field(default=None, compare=False)

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: float) -> "Potential":
        return cls(const=float(c))

    @classmethod
    def log_beta(cls, system: BetaSystem) -> "Potential":
        return cls(const=system.log_beta)

    @classmethod
    def log_gauss_derivative(cls) -> "Potential":
        """``log|G'(x)| = -2 log x``."""
        return cls(lgp=1.0)

    @classmethod
    def tabulated(cls, values, lipschitz: Optional[float] = None, grid=None) -> "Potential":
        """Piecewise-linear interpolant of ``values``; grid defaults to uniform on [0, 1].

        The declared ``lipschitz`` must dominate the interpolant's own slope.
        """
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or len(values) < 2:
            raise DomainError("a table needs at least two samples")
        grid = np.linspace(0.0, 1.0, len(values)) if grid is None else np.asarray(grid, dtype=float)
        if grid.shape != values.shape or grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) <= 0):
            raise DomainError("table grid must increase from 0 to 1")
        slope = float(np.max(np.abs(np.diff(values) / np.diff(grid))))
        if lipschitz is None:
            lipschitz = slope
        if lipschitz < slope * (1 - 1e-12):
            raise DomainError(f"declared Lipschitz constant {lipschitz} is below the table slope {slope}")
        return cls(table=Table(grid, values, float(lipschitz)))

    # -- algebra ------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Potential):
            if self.table is None:
                table = other.table
            elif other.table is None:
                table = self.table
            else:
                table = self.table + other.table
            return Potential(self.const + other.const, self.lgp + other.lgp, table)
        return Potential(self.const + float(other), self.lgp, self.table)

    __radd__ = __add__

    def __mul__(self, k):
        k = float(k)
        table = None if self.table is None else self.table.scaled(k)
        return Potential(self.const * k, self.lgp * k, table)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, Potential) else -float(other))

    # -- queries --------------------------------------------------------------
    @property
    def lipschitz(self) -> float:
        """Lipschitz constant of the bounded part (``log|G'|`` is handled by its envelope)."""
        return 0.0 if self.table is None else self.table.lipschitz

    @property
    def is_constant(self) -> bool:
        return self.table is None and self.lgp == 0.0

    @property
    def kind(self) -> str:
        parts = []
        if self.const:
            parts.append("const")
        if self.table is not None:
            parts.append("table")
        if self.lgp:
            parts.append("loggprime")
        return "+".join(parts) or "const"

    def bounded_range(self) -> tuple:
        """(min, max) of ``const + table`` over [0, 1]."""
        if self.table is None:
            return (self.const, self.const)
        return (self.const + float(self.table.values.min()), self.const + float(self.table.values.max()))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.const)
        if self.table is not None:
            out = out + self.table(x)
        if self.lgp:
            out = out - 2.0 * self.lgp * np.log(x)
        return out

    def on_interval(self, a: float, b: float) -> tuple:
        """(value at midpoint, half-width bound) over ``[a, b]``."""
        a, b = float(a), float(b)
        m = 0.5 * (a + b)
        err = self.lipschitz * 0.5 * (b - a)
        if self.lgp:
            if a <= 0:
                return float(self(m)), float("inf")
            # -2 log x is monotone: the envelope is attained at the endpoints
            err += abs(self.lgp) * 2.0 * max(np.log(m / a), np.log(b / m))
        return float(self(m)), err


# ---------------------------------------------------------------------------
# Birkhoff sums
# ---------------------------------------------------------------------------

@dataclass
class LevelSums:
    """``S_n phi`` for every cylinder of a level.

    ``point`` is the value at the sample point; ``lo``/``hi`` bound ``S_n phi``
    over the whole cylinder.
    """

    point: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def err(self) -> np.ndarray:
        return np.maximum(self.hi - self.point, self.point - self.lo)


def beta_orbit_midpoints(level: BetaLevel) -> np.ndarray:
    """``T^k(mid)`` for ``k = 0..n-1`` as an (N, n) float array.

    Uses ``T^k(mid) = (eps_{k+1} + T^{k+1}(mid)) / beta`` backwards from
    ``T^n(mid) = ell / 2``; no amplification of rounding error.
    """
    n = level.level
    beta = level.beta
    out = np.empty((len(level), n), dtype=float)
    y = level.ell / 2
    for k in range(n - 1, -1, -1):
        y = (level.words[:, k].astype(LD) + y) / beta
        out[:, k] = y
    return out


def beta_level_sums(potential: Potential, level: BetaLevel) -> LevelSums:
    if potential.lgp:
        raise DomainError("log|G'| is not a beta-system potential")
    n = level.level
    point = np.full(len(level), n * potential.const)
    if potential.table is None:
        return LevelSums(point, point.copy(), point.copy())
    orbit = beta_orbit_midpoints(level)
    point = point + potential.table(orbit).sum(axis=1)
    # |T^k I| = beta^(k-n) ell ; sup distance to the midpoint is half of it
    beta = float(level.beta)
    geom = sum(beta ** (k - n) for k in range(n))
    err = potential.table.lipschitz * 0.5 * geom * level.ell.astype(float)
    return LevelSums(point, point - err, point + err)


def gauss_mean_value_orbit(level: GaussLevel) -> np.ndarray:
    """``G^k(x*)`` for the mean-value point ``x*`` of each cylinder.

    ``x*`` is the point with ``|(G^n)'(x*)|^{-1} = |I_n|``; its n-th image is
    ``1 / (1 + sqrt(1 + q_{n-1}/q_n))``.
    """
    n = level.level
    out = np.empty((len(level), n))
    y = 1.0 / (1.0 + np.sqrt(1.0 + level.qprev / level.q))
    for k in range(n - 1, -1, -1):
        y = 1.0 / (level.words[:, k] + y)
        out[:, k] = y
    return out


def _suffix_lengths(level: GaussLevel) -> np.ndarray:
    """``|G^k I| = |I(a_{k+1}..a_n)|`` for k = 0..n-1."""
    n = level.level
    out = np.empty((len(level), n))
    for k in range(n):
        q0 = np.zeros(len(level))
        q1 = np.ones(len(level))
        for j in range(k, n):
            q0, q1 = q1, level.words[:, j] * q1 + q0
        out[:, k] = 1.0 / (q1 * (q1 + q0))
    return out


def gauss_level_sums(potential: Potential, level: GaussLevel) -> LevelSums:
    n = level.level
    point = np.full(len(level), n * potential.const)
    lo = point.copy()
    hi = point.copy()
    if potential.lgp:
        # S_n log|G'| ranges exactly over [2 log q_n, 2 log(q_n + q_{n-1})]
        a = 2.0 * np.log(level.q)
        b = 2.0 * np.log(level.q + level.qprev)
        mv = 0.5 * (a + b)
        point = point + potential.lgp * mv
        lo = lo + np.minimum(potential.lgp * a, potential.lgp * b)
        hi = hi + np.maximum(potential.lgp * a, potential.lgp * b)
    if potential.table is not None:
        orbit = gauss_mean_value_orbit(level)
        s = potential.table(orbit).sum(axis=1)
        err = potential.table.lipschitz * _suffix_lengths(level).sum(axis=1)
        point = point + s
        lo = lo + s - err
        hi = hi + s + err
    return LevelSums(point, lo, hi)


def birkhoff_sum(potential: Potential, cylinder, system=None) -> tuple:
    """``(S_n phi(sample), error bound)`` on one cylinder.

    The sample point is the midpoint for beta cylinders and the mean-value
    point for continued-fraction cylinders.
    """
    if isinstance(cylinder, BetaCylinder):
        if cylinder.level < 1:
            raise DomainError("cylinder level must be >= 1")
        words = np.array([cylinder.word], dtype=np.int64)
        lev = BetaLevel(words, np.array([cylinder.left], dtype=LD),
                        np.array([cylinder.image_len], dtype=LD),
                        np.array([cylinder.is_full]), cylinder.beta)
        s = beta_level_sums(potential, lev)
    elif isinstance(cylinder, CfCylinder):
        if cylinder.level < 1:
            raise DomainError("cylinder level must be >= 1")
        lev = GaussLevel(np.array([cylinder.word], dtype=np.int64),
                         np.array([float(cylinder.q_pair[1])]),
                         np.array([float(cylinder.q_pair[0])]), tuple(sorted(set(cylinder.word))))
        s = gauss_level_sums(potential, lev)
    else:
        raise TypeError(f"unsupported cylinder {type(cylinder).__name__}")
    return float(s.point[0]), float(s.err[0])
