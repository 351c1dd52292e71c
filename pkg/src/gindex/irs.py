"""Inequality resilience pillar.

Three raw metrics feed the pillar: the explanatory power of a per-country
regression of the Gini index on inflation, unemployment and log GDP per
capita; the year-over-year absolute Gini change (inverted, since large
swings are bad); and a smoothness signal built from second differences of
the Gini path.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from gindex._validation import check_weights, check_window, optional_float
from gindex.numerics.ols import OlsFit, SampleSizeError, SingularDesignError, ols_fit
from gindex.numerics.stats import rolling_stat
from gindex.panel import GINI, INFLATION, LOG_GDP_PER_CAPITA, UNEMPLOYMENT, Panel, TimeSeries, get_series
from gindex.scaling import ScalingBounds, invert_bad_metric, score, weighted_mean_renormalized

logger = logging.getLogger(__name__)

METRICS = ("irs.r_squared", "irs.inv_abs_dgini", "irs.smoothing")
DEFAULT_WEIGHTS = (0.40, 0.40, 0.20)
REGRESSORS = (INFLATION, UNEMPLOYMENT, LOG_GDP_PER_CAPITA)


@dataclass(frozen=True, eq=False)
class IrsComponents:
    country: str
    year: int
    r_squared: float | None = None
    abs_dgini: float | None = None
    smoothing: float | None = None
    scores: tuple[float | None, float | None, float | None] = (None, None, None)
    irs: float | None = None
    fit: OlsFit | None = None

    def __post_init__(self):
        if self.abs_dgini is not None and self.abs_dgini < 0:
            raise ValueError("abs_dgini must be non-negative")

    @property
    def raw_metrics(self) -> tuple[float | None, float | None, float | None]:
        """Values pooled for scaling, in ``METRICS`` order."""
        inv = None if self.abs_dgini is None else invert_bad_metric(self.abs_dgini)
        return (self.r_squared, inv, self.smoothing)


@dataclass(frozen=True, eq=False)
class InequalityFit:
    """Regression result plus the years it was estimated on."""

    fit: OlsFit
    years: tuple[int, ...]

    @property
    def r_squared(self) -> float:
        return self.fit.r_squared


def fit_inequality_model(country: str, panel: Panel, min_obs: int = 8) -> InequalityFit | None:
    """OLS of Gini on ``[1, inflation, unemployment, log GDP per capita]``.

    Uses the years where all four series are observed; returns ``None`` if
    fewer than ``min_obs`` such years exist or the design is singular.
    """
    min_obs = check_window(min_obs, len(REGRESSORS) + 3, "min_obs")
    gini = get_series(panel, country, GINI)
    columns = [get_series(panel, country, code) for code in REGRESSORS]
    mask = gini.present.copy()
    for col in columns:
        mask &= col.present
    n = int(mask.sum())
    if n < min_obs:
        logger.info("%s: %d usable Gini years < %d, inequality model skipped", country, n, min_obs)
        return None
    X = np.column_stack([np.ones(n)] + [col.values[mask] for col in columns])
    try:
        fit = ols_fit(X, gini.values[mask])
    except (SingularDesignError, SampleSizeError) as exc:
        logger.warning("%s: inequality model not estimable (%s)", country, exc)
        return None
    return InequalityFit(fit, tuple(int(y) for y in gini.years[mask]))


def delta_gini_series(gini: TimeSeries) -> TimeSeries:
    """``|Gini_t - Gini_{t-1}|``; gaps are never bridged."""
    return gini.with_values(np.abs(gini.diff().values))


def smoothing_signal(gini: TimeSeries, window: int = 5) -> TimeSeries:
    """``1 / (1 + rms of second differences)`` over complete trailing windows.

    A linear Gini path scores 1; jagged paths approach 0.
    """
    window = check_window(window, 3)
    second = gini.diff().diff()
    rms = rolling_stat(second, window - 2, kind="rms")
    out = np.where(rms.present, 1.0 / (1.0 + rms.values), np.nan)
    return gini.with_values(out)


def irs_from_scores(scores, weights=DEFAULT_WEIGHTS) -> float | None:
    weights = check_weights(weights, 3, "IRS weights")
    return weighted_mean_renormalized(zip(scores, weights))


def _score_or_none(value: float | None, bounds: ScalingBounds | None) -> float | None:
    if value is None or bounds is None:
        return None
    return score(value, bounds)


def compute_irs(
    country: str,
    year: int,
    inputs: IrsComponents,
    bounds: Mapping[str, ScalingBounds],
    weights=DEFAULT_WEIGHTS,
) -> IrsComponents:
    """Score the raw components of ``inputs`` and aggregate them into IRS."""
    scores = tuple(_score_or_none(raw, bounds.get(m)) for raw, m in zip(inputs.raw_metrics, METRICS))
    return IrsComponents(
        country=country,
        year=year,
        r_squared=inputs.r_squared,
        abs_dgini=inputs.abs_dgini,
        smoothing=inputs.smoothing,
        scores=scores,
        irs=irs_from_scores(scores, weights),
        fit=inputs.fit,
    )


def irs_inputs(country: str, panel: Panel, min_obs: int = 8, window: int = 5) -> list[IrsComponents]:
    """Unscored IRS components for every panel year of ``country``.

    R^2 is a per-country constant and is attached to every year.
    """
    model = fit_inequality_model(country, panel, min_obs)
    gini = get_series(panel, country, GINI)
    dgini = delta_gini_series(gini)
    smooth = smoothing_signal(gini, window)
    r2 = None if model is None else model.r_squared
    fit = None if model is None else model.fit
    return [
        IrsComponents(
            country=country,
            year=year,
            r_squared=r2,
            abs_dgini=optional_float(dgini.values[i]),
            smoothing=optional_float(smooth.values[i]),
            fit=fit,
        )
        for i, year in enumerate(int(y) for y in gini.years)
    ]


def inequality_fit_table(country: str, panel: Panel, min_obs: int = 8) -> dict | None:
    """Flat record of the inequality regression for reporting."""
    model = fit_inequality_model(country, panel, min_obs)
    if model is None:
        return None
    fit = model.fit
    names = ("const", "inflation", "unemployment", "log_gdppc")
    row: dict[str, float | int | str] = {"country": country, "n_obs": fit.n_obs, "r_squared": fit.r_squared}
    for name, b, p in zip(names, fit.coefficients, fit.p_values):
        row[f"beta_{name}"] = float(b)
        row[f"p_{name}"] = float(p) if math.isfinite(p) else None
    return row
