"""Exception types shared across the package."""


class SpeccohError(Exception):
    """Base class for all package-specific errors."""


class InvalidInput(SpeccohError):
    """Arguments violate a documented precondition."""


class DegenerateSpectrum(SpeccohError):
    """A spectral estimate cannot be normalized.

    Raised when a diagonal smoothed-spectrum entry is not strictly positive
    (an all-zero smoothing window for some series) or when a log-determinant
    statistic meets a non-positive eigenvalue.
    """


class NumericalFailure(SpeccohError):
    """An iterative numerical procedure failed to converge."""


class CalibrationFailure(SpeccohError):
    """A calibration target is unreachable on the search bracket."""


class Unsupported(SpeccohError):
    """The requested computation is outside the supported parameter regime."""
