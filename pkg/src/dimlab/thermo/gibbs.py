"""Level-n approximations of equilibrium states by normalized cylinder weights."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from ..errors import DomainError
from ..symbolic import BetaSystem
from .potential import Potential
from .pressure import BetaPressure, GaussPressure


@dataclass
class GibbsApprox:
    level: int
    words: np.ndarray
    weights: np.ndarray
    pressure_used: float
    system: object  # BetaSystem or "gauss"
    sums: np.ndarray  # S_n phi at the sample points
    log_derivative: np.ndarray  # S_n log|T'| at the sample points
    mass_deficit: float = 0.0
    details: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.weights)

    def weight_of(self, word) -> float:
        word = np.asarray(word)
        hit = np.all(self.words == word, axis=1)
        return float(self.weights[hit].sum())

    def as_dict(self) -> dict:
        return {tuple(int(d) for d in w): float(x) for w, x in zip(self.words, self.weights)}


def _normalize(logw: np.ndarray) -> np.ndarray:
    w = np.exp(logw - logsumexp(logw))
    return w / math.fsum(w)


def gibbs_weights(system, potential: Potential, n: int, pressure_used: Optional[float] = None,
                  digit_cap: Optional[int] = None, alphabet: Optional[Sequence[int]] = None,
                  budget=None) -> GibbsApprox:
    """Weights ``exp(S_n phi(sample) - n P)`` over level-n cylinders, normalized.

    ``system`` is a :class:`BetaSystem` or the string ``"gauss"`` (then give
    ``digit_cap`` or ``alphabet``).  ``pressure_used`` defaults to the point
    estimate of the level-n pressure bracket (tail-corrected for Gauss).  It
    does not change the normalized weights, but the entropy is
    ``P - int phi`` so any offset in it passes straight into ``h``.
    """
    if isinstance(system, BetaSystem):
        bp = BetaPressure(system, n, budget)
        lev = bp.levels[-1]
        s = bp._sums(potential, lev, ("lev", n)).point
        if pressure_used is None:
            pressure_used = bp.bracket(potential).estimate
        logder = np.full(len(lev), n * system.log_beta)
        words = lev.words
        deficit = 0.0
    elif system == "gauss":
        if digit_cap is None and alphabet is None:
            raise DomainError("Gauss weights need digit_cap or alphabet")
        gp = GaussPressure(n, digit_cap=digit_cap, alphabet=alphabet, budget=budget)
        lev = gp.levels[-1]
        s = gp.sums(potential, lev).point
        if pressure_used is None:
            pressure_used = gp.bracket(potential).estimate
        logder = gp._arrays(lev)["mv"]
        words = lev.words
        deficit = gp.mass_deficit(potential) if gp.capped and potential.lgp < -0.5 else 0.0
    else:
        raise DomainError(f"unknown system {system!r}")
    w = _normalize(s - n * pressure_used)
    return GibbsApprox(n, words, w, float(pressure_used), system, s, logder, deficit)


def hdim_gibbs(approx: GibbsApprox) -> tuple:
    """(entropy, dimension) of the level-n weights via the variational identity.

    ``h = P - int phi`` with ``int phi ~ sum w S_n phi / n``; the dimension
    is ``h / int log|T'|``.
    """
    if approx.level < 1:
        raise DomainError("need level >= 1")
    n = approx.level
    w = approx.weights
    mean_phi = math.fsum(w * approx.sums) / n
    h = approx.pressure_used - mean_phi
    lyap = math.fsum(w * approx.log_derivative) / n
    return h, h / lyap
