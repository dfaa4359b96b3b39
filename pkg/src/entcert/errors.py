"""Exception hierarchy shared by every entcert module."""


class EntcertError(Exception):
    """Base class for all library errors."""


class DimensionError(EntcertError, ValueError):
    """A dimension is unsupported or inconsistent between operands."""


class ShapeError(EntcertError, ValueError):
    """An array has the wrong shape (e.g. a non-square density matrix)."""


class ParamError(EntcertError, ValueError):
    """A state parameter lies outside its physical range."""


class ConstructionError(EntcertError, ValueError):
    """A basis or basis collection failed its construction-time validation."""


class NumericalError(EntcertError, ArithmeticError):
    """A computed quantity violates an invariant beyond round-off tolerance."""


class EmptyDataError(EntcertError, ValueError):
    """A counts table has no events."""


class DegenerateError(EntcertError, ValueError):
    """A correlation coefficient is undefined (zero marginal variance)."""
