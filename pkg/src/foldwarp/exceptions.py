"""Semantic exception hierarchy and warning categories.

Every error raised by the library derives from :class:`FoldwarpError`, grouped
into families (input, validation, configuration, numeric degeneracy) so that
the CLI can map them onto distinct exit codes.
"""


class FoldwarpError(Exception):
    """Base class for all library errors."""


# -- input / parsing ----------------------------------------------------------

class SchemaError(FoldwarpError):
    """Input file is structurally unusable (missing header, empty, wrong columns)."""


class ParseError(FoldwarpError):
    """A record in an input file cannot be parsed or violates uniqueness."""


class NonPositiveValue(FoldwarpError):
    """Log transform requested on a value that is not strictly positive."""


# -- dataset validation -------------------------------------------------------

class EmptyAfterFiltering(FoldwarpError):
    """No entity survives replicate-completeness filtering."""


class InconsistentTimeGrid(FoldwarpError):
    """Entities or conditions do not share one common time grid."""


class LengthMismatch(FoldwarpError):
    """Two label vectors that must align have different lengths."""


# -- configuration ------------------------------------------------------------

class InvalidCombination(FoldwarpError):
    """A scenario or option combination is not defined."""


class StepTooLarge(FoldwarpError):
    """A warp step would leave no overlapping time points."""


class SingleCluster(FoldwarpError):
    """An index requiring at least two clusters was asked of a single-cluster labeling."""


# -- numeric degeneracy -------------------------------------------------------

class ZeroVariance(FoldwarpError):
    """Standard-deviation scaling requested but some variance is exactly zero."""


class ZeroNorm(FoldwarpError):
    """Norm scaling requested but some fold change has zero norm."""


class NonPositiveVariance(FoldwarpError):
    """A metric requiring strictly positive variances received a zero or negative one."""


# -- warnings ------------------------------------------------------------------

class DegenerateVarianceWarning(UserWarning):
    """Some estimated fold-change variance is exactly zero."""


class DegenerateSamplingWarning(UserWarning):
    """k-means++ ran out of positive probability mass and fell back to uniform sampling."""
