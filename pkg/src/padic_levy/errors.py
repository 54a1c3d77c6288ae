"""Exception types raised across the package."""


class PadicLevyError(Exception):
    """Base class for all package errors."""


class FieldMismatch(PadicLevyError, ValueError):
    pass


class DimensionMismatch(PadicLevyError, ValueError):
    pass


class DivisionByZero(PadicLevyError, ZeroDivisionError):
    pass


class PrecisionExhausted(PadicLevyError, ArithmeticError):
    """A digit below the tracked precision would be needed."""


class RefinementExplosion(PadicLevyError, RuntimeError):
    """Coset refinement exceeded the configured cap."""


class UndefinedAtZero(PadicLevyError, ArithmeticError):
    pass


class SingularAtZero(PadicLevyError, ArithmeticError):
    pass


class DivergentJ(PadicLevyError, ArithmeticError):
    """A radial sphere series does not converge."""


class UnsupportedDensityConvolution(PadicLevyError, NotImplementedError):
    pass


class InvalidParams(PadicLevyError, ValueError):
    pass


class NotNormalized(PadicLevyError, ValueError):
    pass


class EmptySample(PadicLevyError, ValueError):
    pass


class InvalidThinning(PadicLevyError, ValueError):
    pass


class ConfigError(PadicLevyError, ValueError):
    pass
