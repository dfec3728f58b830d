"""Exception and warning types raised across the package."""


class CatabilityError(Exception):
    """Base class for validation errors (CLI exit code 2)."""


class CutoffTooSmall(CatabilityError):
    pass


class UnderResolved(CutoffTooSmall):
    """A state carries too much weight in the top of the truncated basis."""


class SqueezeOutOfRange(CatabilityError):
    pass


class BadSymmetryIndex(CatabilityError):
    pass


class DimensionMismatch(CatabilityError):
    pass


class OutOfResolvedRegion(CatabilityError):
    pass


class UnnormalizedDistribution(CatabilityError):
    pass


class DisplacementMismatch(CatabilityError):
    pass


class BenchmarkUnavailable(CatabilityError):
    pass


class CorruptTableFile(CatabilityError):
    pass


class GridMismatch(CatabilityError):
    pass


class OptimizerDidNotConverge(RuntimeWarning):
    """Best-found optimum is still returned; CLI maps this to exit code 3."""
