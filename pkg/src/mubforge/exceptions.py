"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """Input violates a documented contract (shape, normalization, range)."""


class DimensionMismatchError(ValidationError):
    """Operands live in different Hilbert-space dimensions."""


class NonHermitianError(ValidationError):
    """A matrix required to be hermitian is not, beyond tolerance."""


class UnsupportedDimensionError(ValidationError):
    """No maximal MUB construction is known for this dimension."""


class ResourceLimitError(RuntimeError):
    """An enumeration would exceed the configured work cap."""


class SolverFailureError(RuntimeError):
    """The SDP solver could not make progress on a problem instance."""


class UndefinedCorrelationError(ValueError):
    """Rank correlation is undefined (zero rank variance)."""
