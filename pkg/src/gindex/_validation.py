"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np


def is_missing(value) -> bool:
    return value is None or (isinstance(value, (float, np.floating)) and math.isnan(value))


def optional_float(value) -> float | None:
    """Normalise ``None``/NaN to ``None`` and everything else to ``float``."""
    if is_missing(value):
        return None
    return float(value)


def check_window(window: int, minimum: int, name: str = "window") -> int:
    if isinstance(window, bool) or not isinstance(window, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(window).__name__}")
    if window < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {window}")
    return int(window)


def check_weights(weights: Sequence[float], n: int, name: str = "weights") -> tuple[float, ...]:
    weights = tuple(float(w) for w in weights)
    if len(weights) != n:
        raise ValueError(f"{name} must have {n} entries, got {len(weights)}")
    if not all(math.isfinite(w) and w > 0 for w in weights):
        raise ValueError(f"{name} must be positive and finite, got {weights}")
    return weights


def check_quantiles(q_low: float, q_high: float) -> tuple[float, float]:
    if not (0.0 <= q_low < q_high <= 1.0):
        raise ValueError(f"need 0 <= q_low < q_high <= 1, got ({q_low}, {q_high})")
    return float(q_low), float(q_high)


def as_finite_1d(values: Iterable[float], name: str = "values") -> np.ndarray:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr
