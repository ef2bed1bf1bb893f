"""Exception hierarchy shared by all modules."""


class InterpolationError(Exception):
    """Base class for every error raised by the package."""


# numerics
class SingularMatrix(InterpolationError, ValueError):
    pass


class SpectralRadiusTooLarge(InterpolationError, ValueError):
    pass


# rational
class DivisionByZeroFunction(InterpolationError, ZeroDivisionError):
    pass


class PoleEvaluation(InterpolationError, ValueError):
    pass


class ZeroOutsideDisk(InterpolationError, ValueError):
    pass


class NonUnimodularConstant(InterpolationError, ValueError):
    pass


class DegreeCapExceeded(InterpolationError, OverflowError):
    pass


# realization
class DuplicateNode(InterpolationError, ValueError):
    pass


class PoleAtNode(InterpolationError, ValueError):
    pass


class InvalidRealization(InterpolationError, ValueError):
    """Unstable or unobservable pair, or inconsistent dimensions."""


# pick / theta
class SingularPick(InterpolationError, ValueError):
    pass


class MuOnSpectrum(InterpolationError, ValueError):
    pass


class DegenerateTransform(InterpolationError, ValueError):
    pass


class DegenerateDenominator(InterpolationError, ValueError):
    pass


class SchurCertificationFailure(InterpolationError, ArithmeticError):
    pass


# solver
class Unsolvable(InterpolationError):
    pass


class TruncationSingular(InterpolationError):
    pass


class InconsistentData(InterpolationError):
    pass


class ParameterSigmaMismatch(InterpolationError, ValueError):
    pass


class PointOnZeroOfU(InterpolationError, ValueError):
    pass


ParameterPointOnZeroOfU = PointOnZeroOfU


# rkhs
class ContextMismatch(InterpolationError, ValueError):
    pass


class PoleInClosedDisk(InterpolationError, ValueError):
    pass


class Unsupported(InterpolationError):
    pass


# cli
class ParseError(InterpolationError, ValueError):
    pass


class ValidationError(InterpolationError, ValueError):
    pass
