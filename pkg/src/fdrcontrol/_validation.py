"""Input validation helpers, in the spirit of sklearn's check_array."""

import math

import numpy as np

from .exceptions import ParameterError


def as_statistic_vector(x, name: str = "x") -> np.ndarray:
    """Coerce to a 1-D float64 vector of finite test statistics."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ParameterError(f"{name} must contain at least one statistic")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} must be finite")
    return arr


def check_open_unit(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ParameterError(f"{name} must lie in the open interval (0, 1), got {value}")
    return value


def check_unit_interval(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_correlation(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho < 1.0:
        raise ParameterError(f"rho must lie in [0, 1), got {rho}")
    return rho


def check_positive_int(value: int, name: str) -> int:
    if int(value) != value or value < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value}")
    return int(value)


def check_nonnegative_int(value: int, name: str) -> int:
    if int(value) != value or value < 0:
        raise ParameterError(f"{name} must be a nonnegative integer, got {value}")
    return int(value)


def check_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}")
    return value
