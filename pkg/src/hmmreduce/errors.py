"""Exception hierarchy shared by all modules."""


class HmmReduceError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HmmReduceError):
    """Model or matrix violates a structural invariant (negativity, row sums)."""


class ReducibilityError(HmmReduceError):
    """Transition matrix has no unique stationary distribution."""


class DomainError(HmmReduceError):
    """Symbol or index outside its valid range."""


class ShapeError(HmmReduceError):
    """Matrix dimensions inconsistent with the requested operation."""


class SizeLimitError(HmmReduceError):
    """Requested object exceeds the configured dense-storage or index limits."""


class InputError(HmmReduceError):
    """Externally supplied data fails a precondition check."""


class DegenerateStateError(HmmReduceError):
    """A hidden state is unreachable, making the requested solve ill-posed."""


class InternalConsistencyError(HmmReduceError):
    """A quantity the algorithm guarantees drifted beyond tolerance."""


class ModelParseError(HmmReduceError):
    """Model file is malformed."""
