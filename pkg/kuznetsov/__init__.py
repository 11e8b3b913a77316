"""Numerical spectral theory of PSL(2,R) modulo PSL(2,Z)."""

import logging

from kuznetsov.errors import (
    ConfigError,
    DatasetError,
    DomainError,
    EnvelopeError,
    KuznetsovError,
    PoleError,
    QuadratureError,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "ConfigError",
    "DatasetError",
    "DomainError",
    "EnvelopeError",
    "KuznetsovError",
    "PoleError",
    "QuadratureError",
]
