"""Input validation helpers used by the functional modules and the estimators."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import ValidationError


def check_series(x, name: str = "series", min_length: int = 1) -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array of finite values.

    Accepts lists, tuples, 1-D arrays and single-column 2-D arrays (the
    sklearn ``(n_samples, 1)`` convention).
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValidationError(f"{name} needs at least {min_length} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"{name} contains a non-finite value at index {bad}")
    return arr


def check_nonnegative(arr: np.ndarray, name: str = "values") -> np.ndarray:
    if np.any(arr < 0):
        bad = int(np.flatnonzero(arr < 0)[0])
        raise ValidationError(f"{name} must be nonnegative; index {bad} is {arr[bad]!r}")
    return arr


def check_positive_scalar(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a finite positive number, got {value!r}")
    return float(value)


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral) or value <= 0:
        raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_order_grid(grid, name: str = "order grid", limit: float = 20.0) -> np.ndarray:
    """Validate a moment-order grid: 1-D, finite, strictly increasing, |order| <= limit."""
    arr = check_series(grid, name)
    if np.any(np.abs(arr) > limit):
        raise ValidationError(f"{name} must stay within [-{limit}, {limit}]")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise ValidationError(f"{name} must be strictly increasing")
    return arr
