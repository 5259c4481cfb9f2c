"""
Validation utilities for slemwatch
Handles the library exception hierarchy and argument checks shared by every module
"""

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)


class SlemError(Exception):
    """Base exception for all slemwatch errors"""

    pass


class ValidationError(SlemError):
    """Raised when inputs violate an operation's preconditions"""

    pass


class NumericalError(SlemError):
    """Raised when a numerical procedure fails (convergence, blow-up, collapse)"""

    pass


def require_positive(value, name):
    """Check that a real value is finite and strictly positive"""
    if value is None or not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return value


def require_non_negative(value, name):
    """Check that a real value is finite and >= 0"""
    if value is None or not math.isfinite(value) or value < 0:
        raise ValidationError(f"{name} must be non-negative, got {value!r}")
    return value


def require_int(value, name, minimum=None):
    """Check that a value is an integer, optionally bounded below"""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def require_finite(values, name):
    """Convert to a float array and check every entry is finite"""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr.ravel()))[0])
        raise ValidationError(f"{name} contains a non-finite value at position {bad}")
    return arr


def require_length(values, name, minimum):
    """Check that a sequence holds at least `minimum` items"""
    if len(values) < minimum:
        raise ValidationError(
            f"{name} needs at least {minimum} samples, got {len(values)}"
        )
    return values


def require_square(matrix, name):
    """Check for a finite square 2-D matrix"""
    arr = require_finite(matrix, name)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    return arr


def require_choice(value, name, choices):
    """Check that a string option is one of the allowed values"""
    if value not in choices:
        raise ValidationError(
            f"{name} must be one of {', '.join(choices)}, got {value!r}"
        )
    return value
