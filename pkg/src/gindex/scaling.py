"""Robust percentile scaling to 0-100 and missing-aware weighted aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from gindex._validation import as_finite_1d, check_quantiles, is_missing
from gindex.numerics.stats import percentile

DEGENERATE_SCORE = 50.0


@dataclass(frozen=True)
class ScalingBounds:
    metric: str
    p5: float
    p95: float
    pool_size: int
    q_low: float = 0.05
    q_high: float = 0.95

    def __post_init__(self):
        if self.p5 > self.p95:
            raise ValueError(f"{self.metric}: lower bound {self.p5} exceeds upper bound {self.p95}")
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")

    @property
    def degenerate(self) -> bool:
        return self.p5 == self.p95


def fit_bounds(pool: Iterable[float], metric: str, q_low: float = 0.05, q_high: float = 0.95) -> ScalingBounds:
    """Percentile bounds of a pooled metric sample (missing values excluded beforehand)."""
    arr = as_finite_1d(pool, metric)
    if arr.size == 0:
        raise ValueError(f"{metric}: cannot fit bounds on an empty pool")
    q_low, q_high = check_quantiles(q_low, q_high)
    return ScalingBounds(metric, percentile(arr, q_low), percentile(arr, q_high), int(arr.size), q_low, q_high)


def score(x: float, bounds: ScalingBounds) -> float:
    """Map ``x`` to ``[0, 100]`` between the bounds, clipping outside them.

    Degenerate bounds (equal percentiles) score every value at 50.
    """
    if bounds.degenerate:
        return DEGENERATE_SCORE
    raw = 100.0 * (x - bounds.p5) / (bounds.p95 - bounds.p5)
    return min(100.0, max(0.0, raw))


def invert_bad_metric(x: float) -> float:
    """``1 / (1 + x)``: turns a non-negative "bad" magnitude into a (0, 1] "good" one."""
    if x < 0 or math.isnan(x):
        raise ValueError(f"expected a non-negative magnitude, got {x}")
    return 1.0 / (1.0 + x)


class WeightedComponent(NamedTuple):
    value: float | None
    weight: float


def weighted_mean_renormalized(components: Iterable[tuple[float | None, float]]) -> float | None:
    """Weighted mean over present components, weights rescaled to sum to one.

    Returns ``None`` when every component is missing.
    """
    num = 0.0
    den = 0.0
    present: list[float] = []
    for value, weight in components:
        if weight <= 0:
            raise ValueError(f"component weights must be positive, got {weight}")
        if is_missing(value):
            continue
        num += weight * value
        den += weight
        present.append(value)
    if not present:
        return None
    # guard the [min, max] property against last-bit rounding
    return min(max(present), max(min(present), num / den))


class PercentileScaler(TransformerMixin, BaseEstimator):
    """Column-wise robust scaler to 0-100.

    ``fit`` pools every non-missing entry of each column into percentile
    bounds; ``transform`` clips scores into ``[0, 100]`` and keeps NaN as
    missing. Columns listed in ``direct_columns`` skip pooling and are
    mapped as ``100 * x`` (for quantities already on a 0-1 scale).
    """

    def __init__(self, q_low: float = 0.05, q_high: float = 0.95, direct_columns=(), metric_names=None):
        self.q_low = q_low
        self.q_high = q_high
        self.direct_columns = direct_columns
        self.metric_names = metric_names

    def fit(self, X, y=None):
        check_quantiles(self.q_low, self.q_high)
        X = check_array(X, ensure_all_finite="allow-nan", dtype=float)
        names = self.metric_names or [f"x{j}" for j in range(X.shape[1])]
        if len(names) != X.shape[1]:
            raise ValueError("metric_names must match the number of columns")
        self.bounds_ = []
        for j in range(X.shape[1]):
            if j in self.direct_columns:
                self.bounds_.append(ScalingBounds(names[j], 0.0, 1.0, max(1, int(np.sum(~np.isnan(X[:, j])))), 0.0, 1.0))
                continue
            col = X[:, j]
            col = col[~np.isnan(col)]
            if col.size == 0:
                self.bounds_.append(None)
            else:
                self.bounds_.append(fit_bounds(col, names[j], self.q_low, self.q_high))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "bounds_")
        X = check_array(X, ensure_all_finite="allow-nan", dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        out = np.full(X.shape, np.nan)
        for j, bounds in enumerate(self.bounds_):
            if bounds is None:
                continue
            for i, x in enumerate(X[:, j]):
                if not np.isnan(x):
                    out[i, j] = score(float(x), bounds)
        return out
