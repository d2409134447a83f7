"""
OPDAD Utilities
Error types and validation helpers; the numerical helpers are imported from their modules.
"""

from .validation_utils import (
    ConfigurationError, HypothesisViolation, NumericalError, OpdadError, StreamFormatError, ValidationUtils,
)

__all__ = [
    'ConfigurationError',
    'HypothesisViolation',
    'NumericalError',
    'OpdadError',
    'StreamFormatError',
    'ValidationUtils',
]
