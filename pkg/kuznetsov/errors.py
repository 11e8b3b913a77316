"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`KuznetsovError`, so callers
can tell numerical failures from programming errors. Domain errors also derive from
:class:`ValueError` and quadrature failures from :class:`ArithmeticError`.
"""

from typing import Optional


class KuznetsovError(Exception):
    """Base class of the package errors."""


class DomainError(KuznetsovError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PoleError(DomainError):
    """A Gamma factor (or a function built on it) is evaluated at one of its poles."""


class EnvelopeError(DomainError):
    """A special function argument or order lies outside the supported envelope."""


class QuadratureError(KuznetsovError, ArithmeticError):
    """
    A numerical integral did not reach its requested tolerance.

    Args:
        message: Human readable description
        estimate: The error estimate attained when the integrator gave up
    """

    def __init__(self, message: str, estimate: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate


class DatasetError(KuznetsovError):
    """
    A spectral dataset is malformed or fails validation.

    Args:
        message: Human readable description
        line: 1-based line number of the offending record, if known
    """

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(KuznetsovError, ValueError):
    """A configuration file or command line value cannot be parsed."""
