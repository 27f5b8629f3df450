"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Malformed or inconsistent input (dimensions, weights, indices)."""


class SizeGuardError(InvalidInputError):
    """Requested size exceeds the enumeration/memory guard."""


class ReductionFailedError(RuntimeError):
    """No affine dependence found although one must exist."""

    def __init__(self, message, support):
        super().__init__(message)
        self.support = list(support)


class SamplingFailedError(RuntimeError):
    """Every sampling attempt missed the requested L-infinity target."""

    def __init__(self, message, attempts, best_distance):
        super().__init__(message)
        self.attempts = attempts
        self.best_distance = best_distance
