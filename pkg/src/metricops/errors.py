"""Exception hierarchy. Every error raised by the package derives from
:class:`MetricOpsError` so callers (and the CLI) can catch them in one place."""


class MetricOpsError(Exception):
    """Base class for all package errors."""


class NotHermitian(MetricOpsError):
    pass


class NotPositive(MetricOpsError):
    pass


class NoConvergence(MetricOpsError):
    pass


class DimensionMismatch(MetricOpsError, ValueError):
    pass


class NotIntertwined(MetricOpsError):
    pass


class LambdaInSpectrum(MetricOpsError):
    pass


class TNotInvertible(MetricOpsError):
    pass


class InsufficientLevels(MetricOpsError):
    pass


class NotSymmetric(MetricOpsError):
    pass


class VerdictUnavailable(MetricOpsError):
    pass


class NotQuasiHermitian(MetricOpsError):
    pass


class GridTooCoarse(MetricOpsError):
    pass


class NonFiniteWeight(MetricOpsError):
    pass


class NotNormalized(MetricOpsError):
    pass


class RecipeUnknown(MetricOpsError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ScenarioError(MetricOpsError):
    """A scenario file parsed but is not a valid scenario."""
