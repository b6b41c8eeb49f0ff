"""Exception types shared across the package."""


class LoopCharError(Exception):
    """Base class for all package-specific errors."""


class ConductorMismatch(LoopCharError):
    """A root of unity was requested whose order does not divide the session conductor."""


class ConductorTooSmall(LoopCharError):
    """The declared conductor cannot host the detected support lattice."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class OrbitInconsistency(LoopCharError):
    """A twist orbit is incomplete or carries mismatched data."""


class BudgetExceeded(LoopCharError):
    """A brute-force enumeration would exceed the configured word budget."""


class NonIntegralResult(LoopCharError):
    """A character formula produced a non-integral or negative coefficient."""


class ParseError(LoopCharError):
    """An input document failed validation."""
