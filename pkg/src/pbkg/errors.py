"""Exception types raised across the package."""


class PBKGError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(PBKGError, ValueError):
    pass


class DimensionError(PBKGError, ValueError):
    pass


class MemoryBudgetError(PBKGError, MemoryError):
    """A dense Fock space would exceed the configured dimension budget."""


class NonNormalizableVacuumError(PBKGError, ValueError):
    pass


class SingularFrequencyError(PBKGError, ValueError):
    pass


class TruncationBudgetError(PBKGError, ValueError):
    pass


class TruncationEdgeError(PBKGError, ValueError):
    """A probe state populates the highest kept Fock level."""


class AliasingError(PBKGError, ValueError):
    pass


class DivergenceError(PBKGError, ArithmeticError):
    """A requested quantity is divergent and is never returned as a number.

    ``scan`` is an optional zero-argument callable returning the
    :class:`~pbkg.correlators.DivergenceScan` that quantifies the divergence.
    """

    def __init__(self, message, scan=None, order="logarithmic"):
        super().__init__(message)
        self.scan = scan
        self.order = order


class ConvergenceError(PBKGError, ArithmeticError):
    pass


class InsufficientDataError(PBKGError, ValueError):
    pass


class FitError(PBKGError, ValueError):
    pass


class CoverageError(PBKGError, ValueError):
    pass


class InternalConsistencyError(PBKGError, AssertionError):
    pass


class ConfigError(PBKGError, ValueError):
    pass
