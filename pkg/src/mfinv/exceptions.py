"""Exception types shared across the pipeline."""


class MfinvError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MfinvError, ValueError):
    """An input violates a documented invariant."""


class ResourceError(MfinvError, RuntimeError):
    """A requested computation would exceed a hard resource cap."""


class ConvergenceError(MfinvError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class DomainError(MfinvError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class FitError(MfinvError, RuntimeError):
    """A regression does not have enough usable points."""


class RangeDetectionError(MfinvError, RuntimeError):
    """No scale window met the goodness-of-fit floor; pass a manual range."""


class InversionError(MfinvError, RuntimeError):
    """An exponent curve cannot be inverted."""
