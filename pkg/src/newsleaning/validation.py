"""Small input-validation helpers used across modules."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import BetaOutOfRange, DimensionMismatch


def check_beta(beta: float) -> float:
    """Validate the knowledge trade-off weight; must lie in [0, 1]."""
    if not isinstance(beta, (int, float)) or isinstance(beta, bool):
        raise BetaOutOfRange(f"beta must be a number, got {type(beta).__name__}")
    b = float(beta)
    if math.isnan(b) or b < 0.0 or b > 1.0:
        raise BetaOutOfRange(f"beta must lie in [0, 1], got {beta}")
    return b


def check_fraction(value: float, name: str = "fraction") -> float:
    """Validate a strictly interior fraction, value in (0, 1)."""
    v = float(value)
    if math.isnan(v) or not 0.0 < v < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")
    return v


def check_positive(value: int, name: str) -> int:
    if int(value) != value or value <= 0:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return int(value)


def as_float_vector(values: Sequence[float] | np.ndarray, dim: int | None = None,
                    name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float64 array, optionally enforcing its length."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(
            f"{name} must have dimension {dim}, got {arr.shape[0]}")
    return arr


def check_last_dim(tensor, dim: int, name: str) -> None:
    """Enforce the trailing dimension of an array or torch tensor."""
    actual = tensor.shape[-1]
    if actual != dim:
        raise DimensionMismatch(f"{name} must have last dimension {dim}, got {actual}")
