"""The exponent ``g_m(u)``, the alpha cascade, and the F_m(B) dimension equation."""
from __future__ import annotations

import math

import mpmath

from ..errors import DomainError
from .potential import Potential
from .pressure import DEFAULT_MARGIN, GaussPressure
from .roots import DimensionResult, _solve_gauss_family


def g_m(m: int, u: float, limit: bool = False) -> float:
    """``g_m(u) = u^m (2u-1) / (u^m - (1-u)^m)`` on ``(1/2, 1]``.

    Evaluated as ``(2u-1) / (1 - r^m)`` with ``r = (1-u)/u``, which is stable
    near ``u = 1/2``.  With ``limit=True`` the removable value ``1/(2m)`` is
    returned at ``u = 1/2``.
    """
    m = int(m)
    if m < 1:
        raise DomainError("m must be >= 1")
    u = float(u)
    if u == 0.5 and limit:
        return 1.0 / (2 * m)
    if not 0.5 < u <= 1.0:
        raise DomainError(f"g_m needs u in (1/2, 1], got {u}")
    if u == 1.0:
        return 1.0
    r = (1.0 - u) / u
    # 1 - r^m = -expm1(m log r) keeps relative accuracy when r is close to 1
    return (2.0 * u - 1.0) / -math.expm1(m * math.log(r))


def log_alpha_cascade(m: int, B: float, u: float) -> list:
    """``log alpha_i``: ``log B g (1-u)^{i-1} / u^i`` for ``i < m``, then ``log B - sum``."""
    m = int(m)
    if B <= 1:
        raise DomainError("B must be > 1")
    if m == 1:
        if not 0.5 < u <= 1.0:
            raise DomainError(f"u must lie in (1/2, 1], got {u}")
        return [math.log(B)]
    if not 0.5 < u < 1.0:
        raise DomainError(f"u must lie in (1/2, 1) for m >= 2, got {u}")
    lb = math.log(B)
    g = g_m(m, u)
    logs = [lb * g * (1.0 - u) ** (i - 1) / u ** i for i in range(1, m)]
    logs.append(lb - math.fsum(logs))
    return logs


def mp_log_alpha_cascade(m: int, B, u, dps: int = 50) -> list:
    """``log alpha_i`` as mpmath numbers; windows built from them round correctly."""
    log_alpha_cascade(m, float(B), float(u))  # domain checks
    with mpmath.workdps(dps):
        B, u = mpmath.mpf(B), mpmath.mpf(u)
        lb = mpmath.log(B)
        if m == 1:
            return [lb]
        r = (1 - u) / u
        g = (2 * u - 1) / (1 - r ** m)
        logs = [lb * g * (1 - u) ** (i - 1) / u ** i for i in range(1, m)]
        logs.append(lb - mpmath.fsum(logs))
        return logs


def alpha_cascade(m: int, B: float, u: float) -> list:
    return [math.exp(v) for v in log_alpha_cascade(m, B, u)]


def cascade_residuals(m: int, B: float, u: float) -> dict:
    """Relative errors of the chain identities for the cascade, evaluated in floats."""
    alphas = alpha_cascade(m, B, u)
    target = B ** g_m(m, u)
    out = {"alpha1": abs(alphas[0] ** u - target) / target}
    prod = 1.0
    chain = 0.0
    for k in range(2, m + 1):
        prod *= alphas[k - 2]
        val = prod ** (2 * u - 1) * alphas[k - 1] ** u
        chain = max(chain, abs(val - target) / target)
    out["chain"] = chain
    out["product"] = abs(math.prod(alphas) - B) / B
    out["log_product"] = abs(math.fsum(log_alpha_cascade(m, B, u)) - math.log(B)) / math.log(B)
    return out


def solve_fmb(m: int, B: float, tol: float = 1e-9, digit_cap: int = 400, n: int = 2,
              budget=None, margin: float = DEFAULT_MARGIN) -> DimensionResult:
    """Root ``u`` of ``P(-u log|G'|, G) - g_m(u) log B = 0`` on ``(1/2, 1]``.

    The term ``g_m(u) log B`` is folded into the potential as a constant, so
    for ``m = 1`` this is literally the Gauss equation with ``f = log B``.
    """
    if B <= 1:
        raise DomainError("B must be > 1")
    if int(m) < 1:
        raise DomainError("m must be >= 1")
    lb = math.log(B)
    gp = GaussPressure(n, digit_cap=digit_cap, budget=budget, margin=margin)
    lgp = Potential.log_gauss_derivative()

    def fam(u):
        # same arithmetic as (-u) * (f + log|G'|) when m = 1
        if m == 1:
            return (Potential.constant(lb) + lgp) * (-u)
        return lgp * (-u) + Potential.constant(-g_m(m, u) * lb)

    # at u = 1 the equation is exactly -log B < 0
    res = _solve_gauss_family(fam, gp, tol, 1.0, "fmb", analytic_hi=1.0)
    res.details.update(m=int(m), B=float(B))
    return res
