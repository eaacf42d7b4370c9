"""Exception and warning types raised across the package."""


class ConfigError(ValueError):
    """Invalid or incomplete configuration. ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class NumericalError(ArithmeticError):
    """Base class for numerical failures (CLI exit code 3)."""


class SingularityError(NumericalError):
    pass


class DegenerateSteadyStateError(NumericalError):
    def __init__(self, dimension):
        super().__init__(f"steady state is not unique: null space has dimension {dimension}")
        self.dimension = dimension


class ConvergenceError(NumericalError):
    pass


class NoCrossingError(NumericalError):
    pass


class WindowError(NumericalError):
    """Half-maximum crossings of a spectrum are not bracketed by the sampled window."""


class SeriesInvalidError(NumericalError):
    """The cubic power series does not describe the data over the fitted range."""


class NonCompressiveError(NumericalError):
    """alpha >= 0: the cubic model has no 1-dB compression point."""


class DegenerateResponseError(NumericalError):
    pass


class ClampWarning(UserWarning):
    """A negative pure-dephasing rate was clamped to zero."""


class SeriesWarning(UserWarning):
    pass
