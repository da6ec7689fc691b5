"""Exception hierarchy shared by all iwagrowth modules."""


class IwagrowthError(Exception):
    """Base class for all library errors."""


class ContextMismatch(IwagrowthError):
    """Operands belong to different prime/precision contexts."""


class NonUnit(IwagrowthError):
    """Inversion of an element with positive valuation."""


class BadRange(IwagrowthError):
    """Index arguments violate an ordering precondition (e.g. n < n0)."""


class CapExceeded(IwagrowthError):
    """A series operation needs degrees beyond the configured cap."""


class PrecisionExhausted(IwagrowthError):
    """A valuation saturated at the working precision; retry with larger K."""


class ConvergenceFailure(IwagrowthError):
    """Iterative division failed to converge within its precision-derived bound."""


class InfiniteModule(IwagrowthError):
    """A quotient certified to have positive free rank where a finite one was required."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class LevelExceeded(IwagrowthError):
    """A coinvariant level exceeds the finite quotient the ring was built for."""


class NoStabilization(IwagrowthError):
    """An exact integer fit did not stabilize on any admissible window."""


class BoundViolated(IwagrowthError):
    """An asymptotic upper bound fails at some table point."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n
