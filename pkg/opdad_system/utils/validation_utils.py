"""
Validation Utilities
Error types and helper checks shared by the simulator modules.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np


class OpdadError(Exception):
    """Base class for simulator errors"""


class ConfigurationError(OpdadError, ValueError):
    """Invalid configuration or operation input"""


class NumericalError(OpdadError, ArithmeticError):
    """Numerical failure: indefinite matrix, degenerate spectrum, non-finite data"""


class HypothesisViolation(OpdadError):
    """Parameters fall outside the regime a convergence bound is stated for"""


class StreamFormatError(OpdadError, ValueError):
    """Malformed observation stream file"""


class ValidationUtils:
    """Utilities for validating simulator inputs"""

    @staticmethod
    def require(check: Tuple[bool, Optional[str]]):
        """Raise ConfigurationError when a (is_valid, message) check failed"""
        is_valid, message = check
        if not is_valid:
            raise ConfigurationError(message)

    @staticmethod
    def validate_positive(value, name: str) -> Tuple[bool, Optional[str]]:
        """
        Validate that a scalar is finite and strictly positive
        Returns (is_valid, error_message)
        """
        try:
            number = float(value)
        except (TypeError, ValueError):
            return False, f"{name} must be a number, got {value!r}"
        if not math.isfinite(number) or number <= 0:
            return False, f"{name} must be positive, got {value!r}"
        return True, None

    @staticmethod
    def validate_count(value, name: str, minimum: int = 1) -> Tuple[bool, Optional[str]]:
        """
        Validate that a value is an integer no smaller than minimum
        Returns (is_valid, error_message)
        """
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            return False, f"{name} must be an integer, got {value!r}"
        if value < minimum:
            return False, f"{name} must be at least {minimum}, got {value}"
        return True, None

    @staticmethod
    def validate_fraction(value, name: str, inclusive: bool = False) -> Tuple[bool, Optional[str]]:
        """
        Validate that a value lies in (0, 1), or [0, 1] when inclusive
        Returns (is_valid, error_message)
        """
        try:
            number = float(value)
        except (TypeError, ValueError):
            return False, f"{name} must be a number, got {value!r}"
        inside = 0.0 <= number <= 1.0 if inclusive else 0.0 < number < 1.0
        if not inside:
            bounds = "[0, 1]" if inclusive else "(0, 1)"
            return False, f"{name} must lie in {bounds}, got {value!r}"
        return True, None

    @staticmethod
    def validate_window(start: int, end: int, blocks: int) -> Tuple[bool, Optional[str]]:
        """
        Validate a 1-based attack window [start, end] inside L blocks
        Returns (is_valid, error_message)
        """
        if not 1 <= start <= end <= blocks:
            return False, f"Attack window must satisfy 1 <= g <= h <= L, got g={start}, h={end}, L={blocks}"
        return True, None

    @staticmethod
    def validate_choice(value: str, options: Sequence[str], name: str) -> Tuple[bool, Optional[str]]:
        """
        Validate that a string is one of the allowed options
        Returns (is_valid, error_message)
        """
        if value not in options:
            valid = ", ".join(options)
            return False, f"Invalid {name} {value!r}. Valid options: {valid}"
        return True, None

    @staticmethod
    def validate_finite(array: np.ndarray, name: str) -> Tuple[bool, Optional[str]]:
        """
        Validate that every entry of an array is finite
        Returns (is_valid, error_message)
        """
        if not np.all(np.isfinite(array)):
            return False, f"{name} contains non-finite entries"
        return True, None

    @staticmethod
    def validate_nonzero_vector(vector: np.ndarray, name: str) -> Tuple[bool, Optional[str]]:
        """
        Validate that a vector has a strictly positive norm
        Returns (is_valid, error_message)
        """
        if vector.size == 0 or not np.linalg.norm(vector) > 0:
            return False, f"{name} must be a non-zero vector"
        return True, None
