"""Exception hierarchy."""


class CorrkitError(Exception):
    """Base class for all errors raised by corrkit."""


class StructureError(CorrkitError, ValueError):
    """Operands do not fit together (mismatched algebras, bad shapes, ...)."""


class InputError(CorrkitError, ValueError):
    """A description file or text could not be parsed or validated."""


class UnsupportedInstance(CorrkitError):
    """The instance is valid but has no finite matrix model (e.g. infinite emitters)."""


class NumericalError(CorrkitError, ArithmeticError):
    """A numerical residual exceeded its tolerance."""


class ConsistencyError(CorrkitError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class SizeLimitError(CorrkitError):
    """A construction would exceed the configured dimension cap."""
