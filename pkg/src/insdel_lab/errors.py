"""Exception hierarchy shared across the package."""


class LabError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(LabError, ValueError):
    """A caller violated a documented precondition."""


class BudgetError(ParameterError):
    """An enumeration would exceed the configured work budget."""


class InvariantViolation(LabError, RuntimeError):
    """A state that is provably unreachable under valid preconditions was hit.

    Raised instead of silently returning, so that a logic bug cannot
    masquerade as a legitimate outcome.
    """
