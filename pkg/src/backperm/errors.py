"""Exception hierarchy shared by all backperm modules.

Every error carries a short machine-readable ``code`` used by the CLI when it
emits JSON error objects.
"""

from __future__ import annotations


class BackpermError(Exception):
    """Base class for all library errors."""

    code = "error"


class DuplicateElement(BackpermError):
    code = "duplicate-element"


class OutOfRange(BackpermError):
    code = "out-of-range"


class TooLarge(BackpermError):
    code = "too-large"


class DimensionMismatch(BackpermError):
    code = "dimension-mismatch"


class ElementNotInSet(BackpermError):
    code = "element-not-in-set"


class MixedLevels(BackpermError):
    code = "mixed-levels"


class DegenerateLevel(BackpermError):
    code = "degenerate-level"


class NonConvergence(BackpermError):
    code = "non-convergence"


class Infeasible(BackpermError):
    code = "infeasible"


class PreconditionViolated(BackpermError):
    code = "precondition-violated"


class NonIntegerReciprocal(BackpermError):
    code = "non-integer-reciprocal"


class SizeMismatch(BackpermError):
    code = "size-mismatch"


class ParseError(BackpermError):
    code = "parse-error"


class DuplicateWeights(BackpermError):
    code = "duplicate-weights"


class InvalidDistribution(BackpermError):
    code = "invalid-distribution"


class InvalidGraph(BackpermError):
    code = "invalid-graph"
