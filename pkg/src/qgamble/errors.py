"""Exception hierarchy shared by all qgamble modules."""


class QGambleError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(QGambleError, ValueError):
    """An argument is out of range or has the wrong shape."""


class InvalidStateError(QGambleError, ValueError):
    """A state vector is not normalized (or otherwise degenerate)."""


class InvalidStrategyError(InvalidArgumentError):
    """Alice's preparation amplitudes do not form a unit vector."""


class InvalidSpecError(InvalidArgumentError):
    """A ring specification violates hermiticity or shape constraints."""


class ReductionInvalidError(QGambleError):
    """The spectral-gap condition for the two-level reduction failed.

    ``ratio`` is the measured gap / coupling ratio, ``required`` the threshold.
    """

    def __init__(self, message: str, ratio: float, required: float):
        super().__init__(message)
        self.ratio = ratio
        self.required = required
