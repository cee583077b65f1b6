"""Input validation helpers for the numeric estimators and functions."""

from __future__ import annotations

import numpy as np

from .errors import ComputationError, InputError


def as_vector(values, name: str = "values") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InputError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array; 1-D input becomes a single column."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InputError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def require_same_length(a, b, a_name: str = "x", b_name: str = "y") -> None:
    if len(a) != len(b):
        raise InputError(
            f"{a_name} and {b_name} must have the same length ({len(a)} != {len(b)})"
        )


def require_min_length(values, minimum: int, name: str = "values") -> None:
    if len(values) < minimum:
        raise InputError(f"{name} needs at least {minimum} points, got {len(values)}")


def require_positive(values: np.ndarray, name: str = "values") -> None:
    """Strict positivity check; reports the first offending index."""
    bad = np.flatnonzero(values <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise ComputationError(f"{name}[{i}] = {values[i]} is not strictly positive")
