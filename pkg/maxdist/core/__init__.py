"""
Core utilities and configuration
"""

from maxdist.core.errors import (
    CertificateError,
    DomainError,
    GeometryError,
    InfeasibleError,
    InputError,
    MaxDistError,
)

__all__ = [
    "MaxDistError",
    "InputError",
    "DomainError",
    "GeometryError",
    "InfeasibleError",
    "CertificateError",
]
