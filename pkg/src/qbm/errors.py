"""Exception hierarchy shared by all qbm modules."""


class QbmError(Exception):
    """Base class for every error raised by this package."""


class FixedPointOverflowError(QbmError):
    """A value left the representable range of its fixed-point format."""


class NonPositiveInputError(QbmError):
    """An operation defined only for positive arguments got x <= 0."""


class NegativeInputError(QbmError):
    """An operation defined only for nonnegative arguments got x < 0."""


class OutOfDomainError(QbmError):
    """Evaluation point lies outside a piecewise spec's domain."""


class DomainSingularityError(QbmError):
    """A fit domain touches a singularity of the target function."""


class BadAmplitudeError(QbmError):
    """Amplitude outside [0, 1]."""


class DimensionMismatchError(QbmError):
    """Incompatible shapes between sample sets and a linear transform."""


class NotPositiveDefiniteError(QbmError):
    """Covariance matrix is not symmetric positive-definite."""


class EpsilonTooLargeError(QbmError):
    """Requested accuracy makes the truncation window empty."""


class EpsilonRangeError(QbmError):
    """Accuracy parameter outside the range a driver supports."""


class PayoffRangeError(QbmError):
    """A payoff left the range its estimator assumes."""


class EmptySampleError(QbmError):
    """A metric was asked for on an empty sample."""


class TooFewSamplesError(QbmError):
    """Not enough samples for a quantile estimate."""


class ProbabilityRangeError(QbmError):
    """Probability argument outside (0, 1)."""
