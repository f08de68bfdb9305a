"""Exception hierarchy.

Every numerical failure raised by the library derives from ``ProfileKitError``
so the CLI can map it to exit status 1 with a one-line diagnostic.
"""


class ProfileKitError(Exception):
    """Base class for library errors."""


class DomainError(ProfileKitError, ValueError):
    """An input lies outside the domain an operation accepts."""


class ArgumentError(ProfileKitError, ValueError):
    """Inconsistent arguments (caps, degrees, lengths)."""


class DegreeError(ArgumentError):
    """A degree requirement is not met."""


class ZeroPolynomialError(ArgumentError):
    """The operation produced or received the zero polynomial."""


class PreconditionError(ArgumentError):
    """A documented precondition (divisibility, convention) fails."""


class DegenerateIntervalError(ProfileKitError, ValueError):
    """A profile would live on a single point."""


class ExtrapolationError(ProfileKitError, ValueError):
    """Requested value lies outside the sampled range."""

    def __init__(self, msg, lo=None, hi=None):
        super().__init__(msg)
        self.lo = lo
        self.hi = hi


class RangeError(ProfileKitError, ValueError):
    """Target value lies outside the range of a monotone map."""


class ShapeError(ProfileKitError, ValueError):
    """Sampled data violates a required shape (concavity, monotonicity)."""


class SingularityError(ProfileKitError, ValueError):
    """Evaluation point sits on (or numerically at) a singularity."""


class ConsistencyError(ProfileKitError):
    """Two independent computations of the same object disagree."""


class RootIsolationError(ProfileKitError):
    """Sign-change count disagrees with the expected root count."""

    def __init__(self, msg, level=None, interval=None):
        super().__init__(msg)
        self.level = level
        self.interval = interval


class UnsupportedError(ProfileKitError, NotImplementedError):
    """No closed form is available for the requested evaluation."""
