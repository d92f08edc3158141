"""Exception types shared across dimlab.

The CLI maps these onto exit codes (domain 2, budget 3, inconclusive 4).
"""
import os

DEFAULT_BUDGET = 10**8


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class BudgetExceeded(RuntimeError):
    """An enumeration would visit more nodes than the configured budget."""

    def __init__(self, what, needed, budget):
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: needs ~{needed:.3g} nodes, budget is {budget:.3g} "
                         f"(raise with budget= or DIMLAB_BUDGET)")


class InconclusiveError(RuntimeError):
    """A root bracket could not be certified at the requested truncation."""

    def __init__(self, message, residuals=None):
        self.residuals = residuals or {}
        super().__init__(message)


class InvariantViolation(RuntimeError):
    """A geometric invariant (disjointness, ordering, ...) failed."""


def resolve_budget(budget=None):
    if budget is not None:
        return int(budget)
    env = os.environ.get("DIMLAB_BUDGET")
    if env:
        return int(float(env))
    return DEFAULT_BUDGET
