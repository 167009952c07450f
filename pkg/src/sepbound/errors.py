"""Exception types shared across the package."""


class HypothesisViolation(ValueError):
    """A theorem's hypothesis does not hold for the requested parameters."""


class BudgetExceeded(RuntimeError):
    """A Monte Carlo request exceeds the configured compute budget."""
