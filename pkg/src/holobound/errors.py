"""Exception types shared across the toolkit."""


class HoloboundError(Exception):
    """Base class for all toolkit errors."""


class PreconditionViolation(HoloboundError, ValueError):
    """An operation was called on inputs violating its stated contract."""


class ShapeError(HoloboundError, ValueError):
    """A denominator-capping matrix does not have the required staircase columns."""


class PoleError(HoloboundError, ArithmeticError):
    """The lower hypergeometric parameter hit a nonpositive integer before termination."""


class IdentityFailure(HoloboundError, AssertionError):
    """An exact power-series identity failed; carries the first bad power."""

    def __init__(self, message, power=None):
        super().__init__(message)
        self.power = power


class SingularityError(HoloboundError, ArithmeticError):
    """Evaluation requested at (or too near) a singular point."""


class DomainError(HoloboundError, ValueError):
    """A composed point left the domain where the map is defined."""


class NonConvergence(HoloboundError, ArithmeticError):
    """An iterative construction failed to settle within tolerance."""


class NonFiniteSample(HoloboundError, ArithmeticError):
    """A quadrature sample produced a non-finite value."""


class NanInput(HoloboundError, ValueError):
    """A scenario field contains NaN."""


class NoThreshold(HoloboundError, ArithmeticError):
    """No exponent threshold exists: the limiting bound already fails the target."""


class InfeasibleEverywhere(HoloboundError, ArithmeticError):
    """Every grid point in a certificate sweep had a nonpositive denominator."""


class SearchFailure(HoloboundError, AssertionError):
    """A pigeonhole-guaranteed search found nothing; indicates a bug."""


class OnsetError(HoloboundError, ValueError):
    """The lower-bound function is not yet monotone on the requested bracket."""


class RouteDisagreement(HoloboundError, AssertionError):
    """Two independent routes to the same 2-adic value disagree; fatal by design."""


class InsufficientPrecision(HoloboundError, ArithmeticError):
    """A 2-adic computation cannot reach the requested precision."""


class TypeViolation(HoloboundError, AssertionError):
    """A coefficient failed its denominator-type or growth check."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InconsistentG2(HoloboundError, AssertionError):
    """The overdetermined linear system for the 2-adic Catalan constant is inconsistent."""
