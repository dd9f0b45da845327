"""Exception hierarchy shared across the package."""


class DegrenetError(Exception):
    """Base class for all package errors."""


class DomainError(DegrenetError, ValueError):
    """An argument lies outside the domain of the operation."""


class ExistenceError(DegrenetError, ValueError):
    """No stationary degree distribution exists for the requested parameters."""


class TruncationError(DegrenetError, ValueError):
    """The truncated PMF leaves more tail mass than the tolerance allows."""

    def __init__(self, message, tail_mass=None, suggested_k_max=None):
        super().__init__(message)
        self.tail_mass = tail_mass
        self.suggested_k_max = suggested_k_max


class UnsupportedPolicyError(DegrenetError, ValueError):
    pass


class UndefinedCorrelationError(DegrenetError, ValueError):
    """Pearson correlation requested for a constant vector."""


class ResourceError(DegrenetError, RuntimeError):
    """A simulation exceeded its event cap.

    ``partial`` holds whatever was produced before the abort.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InfeasibleArrivalError(DegrenetError, RuntimeError):
    """Fewer live vertices than edges carried by an arriving vertex."""


class MalformedLineError(DegrenetError, ValueError):
    pass


class EmptyInputError(DegrenetError, ValueError):
    pass
