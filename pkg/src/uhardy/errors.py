"""Exception types shared across the package."""


class UHardyError(Exception):
    """Base class for all package errors."""


class CapacityError(UHardyError, ValueError):
    """An input exceeds a hard size bound (factorials, enumeration, sampling)."""


class DomainError(UHardyError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(UHardyError, ValueError):
    """Malformed input: duplicate indices, bad shapes, non-unitary matrices."""
