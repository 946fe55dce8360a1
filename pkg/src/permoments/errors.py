"""Exceptions shared by the oracle, formula and verification layers."""


class BudgetExceeded(RuntimeError):
    """Refused up front: the estimated work exceeds the configured budget."""

    def __init__(self, estimate: int, budget: int, what: str = "enumeration"):
        super().__init__(
            f"{what} needs ~{estimate:.3g} kernel evaluations, budget is {budget:.3g}"
        )
        self.estimate = estimate
        self.budget = budget


class UnsupportedMeasure(ValueError):
    pass


class InfeasibleEnsemble(ValueError):
    pass


class HypothesisViolated(ValueError):
    """Inputs do not satisfy sum(a) = 0 and sum(a*q) = 0."""


class DegenerateRemainder(ArithmeticError):
    """The remainder is exactly zero on the whole grid; no slope exists."""
