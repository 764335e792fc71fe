"""Exception types shared across the package."""


class GroupLassoError(Exception):
    """Base class for all package errors."""


class OverlapError(GroupLassoError):
    """A coordinate index appears in more than one group."""


class CoverageError(GroupLassoError):
    """Groups do not cover {0..K-1}, or an index is out of range."""


class EmptyGroupError(GroupLassoError):
    """A group contains no indices."""


class DimensionError(GroupLassoError):
    """Array shapes are inconsistent with the partition or problem."""


class ShapeMismatchError(GroupLassoError):
    """Multi-task designs or responses do not share a common shape."""


class NonFiniteError(GroupLassoError):
    """NaN or Inf encountered during a numerical routine."""


class DomainError(GroupLassoError):
    """A scalar parameter lies outside its admissible range."""


class NonConstantDiagonalError(GroupLassoError):
    """The Gram diagonal is not constant, but the check requires it."""


class DegenerateError(GroupLassoError):
    """Sampling produced no usable direction (all on-support parts zero)."""


class CombinatorialBlowupError(GroupLassoError):
    """Exact subset enumeration would exceed the configured budget."""
