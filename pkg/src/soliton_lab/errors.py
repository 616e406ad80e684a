"""Exception hierarchy shared by all modules."""


class SolitonLabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SolitonLabError, ValueError):
    """A point lies outside the region where an object is defined."""


class UnsupportedOrder(SolitonLabError, ValueError):
    pass


class NotPositive(SolitonLabError, ValueError):
    pass


class MissingDerivative(SolitonLabError):
    pass


class DegenerateHessian(SolitonLabError):
    pass


class DegenerateD(SolitonLabError):
    """The general resolvent denominator vanishes at the requested point."""


class NotHomogeneous(SolitonLabError):
    pass


class IllConditioned(SolitonLabError):
    pass


class SeparableBranch(SolitonLabError):
    """The conformally flat 2x2 system is singular; q is a function of x+y."""


class QuadratureFailure(SolitonLabError):
    pass


class SingularDenominator(SolitonLabError):
    def __init__(self, cause, message=None):
        self.cause = cause
        super().__init__(message or f"singular denominator ({cause})")


class StepSizeUnderflow(SolitonLabError):
    def __init__(self, location, hypothesis=None):
        self.location = location
        self.hypothesis = hypothesis
        super().__init__(f"step size underflow at {location!r} (likely {hypothesis})")


class NotExtended(SolitonLabError):
    pass


class BadSeed(SolitonLabError):
    pass


class Unclassifiable(SolitonLabError):
    pass


class NotSimpleRoot(SolitonLabError):
    pass


class InvalidSpec(SolitonLabError, ValueError):
    pass
