"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Shapes do not fit the operation."""


class PreconditionError(ValueError):
    """An input violates a mathematical precondition (Hermitian, PD, ...)."""


class RankError(PreconditionError):
    """Input vectors are linearly dependent to working precision."""


class OutOfRangeError(ValueError):
    """A vector does not lie in the range of the reproducing kernel."""


class ConfigurationError(ValueError):
    """An object lacks the configuration an operation needs."""


class GenerationError(RuntimeError):
    """A random instance could not be produced within the retry budget."""


class InputFormatError(ValueError):
    """A matrix or family file is malformed."""
