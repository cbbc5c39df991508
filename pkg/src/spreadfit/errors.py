"""Exception hierarchy shared across the package."""


class SpreadfitError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SpreadfitError):
    """A parameter or argument is outside the mathematical domain."""


class EvalError(SpreadfitError):
    """A special-function evaluation failed (overflow / NaN)."""


class QuantileFailure(SpreadfitError):
    """The quantile root search did not converge.

    Recoverable by design: callers drop the affected quantile level or
    time step instead of aborting.
    """


class NonConvergence(SpreadfitError):
    """A maximum-likelihood fit could not be completed."""


class SingularDesign(SpreadfitError):
    """A design matrix is rank deficient."""


class MissingCovariate(SpreadfitError):
    """A prediction row does not supply every active covariate."""


class CalendarError(SpreadfitError):
    """A raw day has an hour count other than 23/24/25."""


class InsufficientHistory(SpreadfitError):
    """Not enough prior days to apply the 7-day fill rule."""


class EmptyHorizon(SpreadfitError):
    """An aggregate was requested over zero evaluated steps."""


class NoCandidate(SpreadfitError):
    """Model selection was invoked with no finite-scoring candidate."""


class DegenerateVariance(SpreadfitError):
    """A test statistic's variance estimate is zero."""


class SchemaError(SpreadfitError):
    """An input CSV does not match the documented schema."""


class MissingArchive(SpreadfitError):
    """A pipeline stage requires an archive that does not exist."""
