"""Exception types raised by blochbound."""


class BlochError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(BlochError, ValueError):
    pass


class ShapeError(BlochError, ValueError):
    pass


class InvalidStateError(BlochError, ValueError):
    pass


class InvalidObservableError(BlochError, ValueError):
    pass


class InvalidArgumentError(BlochError, ValueError):
    pass


class DegeneratePairError(BlochError, ValueError):
    """Two observables have proportional Bloch vectors, so no Horn gap exists."""


class SamplingExhaustedError(BlochError, RuntimeError):
    """Rejection sampling at a fixed Bloch norm ran out of attempts."""

    def __init__(self, bloch_norm, attempts):
        super().__init__(
            f"no positive state found at Bloch norm {bloch_norm!r} "
            f"after {attempts} attempts"
        )
        self.bloch_norm = bloch_norm
        self.attempts = attempts
