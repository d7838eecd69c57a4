class RegimeError(ValueError):
    """Parameters fall outside the regime a formula is valid for."""


class InapplicableError(ValueError):
    """A bound's hypothesis does not hold at the given state."""


class IntegrationError(RuntimeError):
    """The ODE solver gave up (step size underflow or similar)."""


class NoConvergenceError(RuntimeError):
    """A trajectory never reaches the region being searched for."""
