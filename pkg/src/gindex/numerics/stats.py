"""Order statistics, Student-t tail, correlation and rolling-window statistics."""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from gindex._validation import as_finite_1d, check_window
from gindex.panel import TimeSeries


def percentile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation percentile with rank ``h = (n - 1) * q``.

    This is the "type 7" rule (numpy's default ``linear`` method).

    >>> percentile(range(1, 11), 0.05)
    1.45
    """
    arr = np.sort(as_finite_1d(values))
    if arr.size == 0:
        raise ValueError("percentile of an empty sequence")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    h = (arr.size - 1) * q
    lo = int(math.floor(h))
    if lo >= arr.size - 1:
        return float(arr[-1])
    frac = h - lo
    return float(arr[lo] + frac * (arr[lo + 1] - arr[lo]))


# Regularized incomplete beta via the modified Lentz continued fraction.
_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 1000


def _beta_cf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """Upper-tail probability P(T > t) for Student's t with ``df`` degrees of freedom.

    Two-sided p-values are ``2 * student_t_sf(abs(t), df)``.
    """
    if df <= 0:
        raise ValueError(f"df must be positive, got {df}")
    if math.isnan(t):
        raise ValueError("t is NaN")
    if t == 0:
        return 0.5
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * betainc(df / 2.0, 0.5, x)
    return tail if t > 0 else 1.0 - tail


def two_sided_p(t: float, df: float) -> float:
    return min(1.0, 2.0 * student_t_sf(abs(t), df))


class Correlation(NamedTuple):
    r: float
    degenerate: bool


def _is_flat(x: np.ndarray) -> bool:
    return bool(np.ptp(x) == 0.0)


def pearson_corr(x: Sequence[float], y: Sequence[float]) -> Correlation:
    """Sample Pearson correlation.

    A zero-variance input returns ``Correlation(0.0, degenerate=True)``.
    """
    x = as_finite_1d(x, "x")
    y = as_finite_1d(y, "y")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError("need at least two observations")
    if _is_flat(x) or _is_flat(y):
        return Correlation(0.0, True)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return Correlation(0.0, True)
    r = float(dx @ dy) / denom
    return Correlation(min(1.0, max(-1.0, r)), False)


_KINDS = ("variance", "rms", "mean")


def _window_value(chunk: np.ndarray, kind: str) -> float:
    if kind == "variance":
        return float(np.var(chunk, ddof=1))
    if kind == "rms":
        return math.sqrt(float(np.mean(chunk * chunk)))
    return float(np.mean(chunk))


def _require_contiguous(series: TimeSeries) -> None:
    if not series.is_contiguous:
        raise ValueError("rolling statistics need a series over consecutive years")


def rolling_stat(series: TimeSeries, window: int, kind: str = "variance") -> TimeSeries:
    """Trailing-window statistic over years ``t - window + 1 .. t``.

    ``variance`` is the sample variance (divisor ``window - 1``), ``rms`` the
    root of the mean square (divisor ``window``). A value is emitted only when
    every slot of the window is observed.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    window = check_window(window, 2 if kind == "variance" else 1)
    _require_contiguous(series)
    vals = series.values
    out = np.full(vals.shape, np.nan)
    for end in range(window - 1, vals.size):
        chunk = vals[end - window + 1 : end + 1]
        if not np.isnan(chunk).any():
            out[end] = _window_value(chunk, kind)
    return series.with_values(out)


def rolling_corr(
    x: TimeSeries, y: TimeSeries, window: int, return_degenerate: bool = False
):
    """Trailing-window Pearson correlation of two aligned series.

    With ``return_degenerate=True`` a boolean mask of windows hit by the
    zero-variance rule is returned alongside the series.
    """
    window = check_window(window, 3)
    if not np.array_equal(x.years, y.years):
        raise ValueError("series must share the same years")
    _require_contiguous(x)
    out = np.full(x.values.shape, np.nan)
    flags = np.zeros(x.values.shape, dtype=bool)
    for end in range(window - 1, out.size):
        xs = x.values[end - window + 1 : end + 1]
        ys = y.values[end - window + 1 : end + 1]
        if np.isnan(xs).any() or np.isnan(ys).any():
            continue
        corr = pearson_corr(xs, ys)
        out[end] = corr.r
        flags[end] = corr.degenerate
    result = x.with_values(out)
    if return_degenerate:
        return result, flags
    return result
