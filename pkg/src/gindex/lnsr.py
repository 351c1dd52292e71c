"""Liquidity and systemic resilience pillar."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from gindex._validation import check_weights, check_window, is_missing, optional_float
from gindex.numerics.stats import rolling_corr, rolling_stat
from gindex.panel import BROAD_MONEY_GDP, GDP_GROWTH, INFLATION, M3_GROWTH, Panel, get_series
from gindex.scaling import ScalingBounds, invert_bad_metric, score, weighted_mean_renormalized

logger = logging.getLogger(__name__)

METRICS = ("lnsr.inv_var_v", "lnsr.inv_rms_eps", "lnsr.align")
DEFAULT_WEIGHTS = (0.35, 0.35, 0.30)
DEFAULT_MU = M3_GROWTH


@dataclass(frozen=True)
class LnsrComponents:
    country: str
    year: int
    v: float | None = None
    dv: float | None = None
    var_v: float | None = None
    eps: float | None = None
    rms_eps: float | None = None
    align: float | None = None
    align_degenerate: bool = False
    scores: tuple[float | None, float | None, float | None] = (None, None, None)
    lnsr: float | None = None

    def __post_init__(self):
        if self.var_v is not None and self.var_v < 0:
            raise ValueError("var_v must be non-negative")
        if self.rms_eps is not None and self.rms_eps < 0:
            raise ValueError("rms_eps must be non-negative")
        if self.align is not None and not 0.0 <= self.align <= 1.0:
            raise ValueError("align must lie in [0, 1]")

    @property
    def raw_metrics(self) -> tuple[float | None, float | None, float | None]:
        inv_var = None if self.var_v is None else invert_bad_metric(self.var_v)
        inv_rms = None if self.rms_eps is None else invert_bad_metric(self.rms_eps)
        return (inv_var, inv_rms, self.align)


def liquidity_speed(m3gdp: float | None) -> float | None:
    """``100 / M3GDP``; missing for absent or non-positive monetary depth."""
    if is_missing(m3gdp):
        return None
    if m3gdp <= 0:
        logger.warning("broad money / GDP %r is not positive, liquidity speed left missing", m3gdp)
        return None
    return 100.0 / m3gdp


def residual_force(pi, mu, g, dv) -> float | None:
    """``pi - (mu - g + dv)``, or ``None`` if any input is missing."""
    if any(is_missing(x) for x in (pi, mu, g, dv)):
        return None
    return pi - (mu - g + dv)


def lnsr_from_scores(scores, weights=DEFAULT_WEIGHTS) -> float | None:
    weights = check_weights(weights, 3, "LNSR weights")
    return weighted_mean_renormalized(zip(scores, weights))


def lnsr_inputs(country: str, panel: Panel, window: int = 5, mu_indicator: str = DEFAULT_MU) -> list[LnsrComponents]:
    """Unscored LNSR diagnostics for every panel year of ``country``."""
    window = check_window(window, 3)
    m3gdp = get_series(panel, country, BROAD_MONEY_GDP)
    v = m3gdp.with_values([np.nan if (s := liquidity_speed(x)) is None else s for x in m3gdp.values])
    dv = v.diff()
    pi = get_series(panel, country, INFLATION)
    g = get_series(panel, country, GDP_GROWTH)
    mu = get_series(panel, country, mu_indicator)
    eps = pi.with_values(pi.values - (mu.values - g.values + dv.values))
    var_v = rolling_stat(v, window, "variance")
    rms_eps = rolling_stat(eps, window, "rms")
    corr, degenerate = rolling_corr(dv, g, window, return_degenerate=True)
    align = np.abs(corr.values)
    return [
        LnsrComponents(
            country=country,
            year=int(year),
            v=optional_float(v.values[i]),
            dv=optional_float(dv.values[i]),
            var_v=optional_float(var_v.values[i]),
            eps=optional_float(eps.values[i]),
            rms_eps=optional_float(rms_eps.values[i]),
            align=optional_float(align[i]),
            align_degenerate=bool(degenerate[i]),
        )
        for i, year in enumerate(v.years)
    ]


def score_lnsr(
    components: LnsrComponents, bounds: Mapping[str, ScalingBounds], weights=DEFAULT_WEIGHTS
) -> LnsrComponents:
    scores = tuple(
        None if raw is None or bounds.get(m) is None else score(raw, bounds[m])
        for raw, m in zip(components.raw_metrics, METRICS)
    )
    return replace(components, scores=scores, lnsr=lnsr_from_scores(scores, weights))


def compute_lnsr(
    country: str,
    panel: Panel,
    bounds: Mapping[str, ScalingBounds],
    window: int = 5,
    weights=DEFAULT_WEIGHTS,
    mu_indicator: str = DEFAULT_MU,
) -> list[LnsrComponents]:
    """Per-year LNSR for ``country`` against pre-fitted pooled bounds."""
    return [score_lnsr(c, bounds, weights) for c in lnsr_inputs(country, panel, window, mu_indicator)]
