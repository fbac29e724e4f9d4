"""Exception hierarchy shared by all ffgamma modules."""


class FFGammaError(Exception):
    """Base class for every error raised by ffgamma."""


class DomainError(FFGammaError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PrecisionError(DomainError):
    """A series is not known to enough precision to answer the question.

    Kept distinct from a ``False`` answer: the caller must decide whether to
    recompute at higher precision.
    """


class ResourceGuardError(FFGammaError):
    """An enumeration would exceed the configured size guard."""


class NonConvergenceError(ResourceGuardError):
    """An adaptive loop hit its safety ceiling."""
