"""Exception types raised across the package."""


class QicError(Exception):
    """Base class for all package errors."""


class DimensionError(QicError, ValueError):
    """Operands have incompatible shapes."""


class ValidationError(QicError, ValueError):
    """An object violates a density-operator, distribution or channel invariant."""


class GuardError(QicError, RuntimeError):
    """An exact enumeration or simulation would exceed its size guard."""
