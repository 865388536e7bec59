"""Exception hierarchy shared across dfkit."""


class DFKitError(Exception):
    """Base class; ``violations`` carries structured evidence when available."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class NotSquare(DFKitError, ValueError):
    pass


class NotHermitian(DFKitError, ValueError):
    pass


class NotPSD(DFKitError, ValueError):
    pass


class NotNormalized(DFKitError, ValueError):
    pass


class NotBiadditive(DFKitError, ValueError):
    pass


class EventOutOfRange(DFKitError, IndexError):
    pass


class GramMismatch(DFKitError, ValueError):
    pass


class DimensionMismatch(DFKitError, ValueError):
    pass


class RepMismatch(DFKitError, ValueError):
    pass


class NotUnitary(DFKitError, ValueError):
    pass


class SearchExhausted(DFKitError, RuntimeError):
    pass


class NotGrade2Additive(DFKitError, ValueError):
    pass


class NotStronglyPositive(DFKitError, ValueError):
    pass


class CapExceeded(DFKitError, ValueError):
    pass


class ConsistencyError(DFKitError, AssertionError):
    """Two routes to the same mathematical fact disagreed numerically."""
