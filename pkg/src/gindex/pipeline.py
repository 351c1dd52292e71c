"""End-to-end estimator: pooled bounds on ``fit``, pillars and composite on ``transform``."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from gindex import ifc as ifc_mod
from gindex import irs as irs_mod
from gindex import lnsr as lnsr_mod
from gindex._validation import check_quantiles, check_weights, check_window
from gindex.composite import GiRecord, GiWeights, aggregate_gi, attach_contributions
from gindex.irs import IrsComponents
from gindex.ifc import ForecastSet, IfcComponents, IfcConfig
from gindex.lnsr import LnsrComponents
from gindex.panel import M3_GROWTH, Panel
from gindex.scaling import ScalingBounds, fit_bounds

logger = logging.getLogger(__name__)

METRICS = irs_mod.METRICS + lnsr_mod.METRICS + ifc_mod.METRICS


@dataclass(frozen=True)
class CountryYear:
    country: str
    year: int
    irs: IrsComponents
    lnsr: LnsrComponents
    ifc: IfcComponents
    gi: GiRecord


@dataclass
class GIResult:
    """Everything ``GIEstimator.transform`` produces, ordered by (country, year)."""

    records: list[CountryYear]
    bounds: dict[str, ScalingBounds]
    forecasts: dict[str, ForecastSet] = field(default_factory=dict)
    inequality_fits: dict[str, irs_mod.InequalityFit | None] = field(default_factory=dict)
    weights: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def __iter__(self) -> Iterator[CountryYear]:
        return iter(self.records)

    @property
    def countries(self) -> list[str]:
        return sorted({r.country for r in self.records})

    def for_country(self, country: str) -> list[CountryYear]:
        return [r for r in self.records if r.country == country]

    def gi_series(self, country: str) -> list[float | None]:
        return [r.gi.gi for r in self.for_country(country)]


@dataclass
class _CountryInputs:
    irs: list[IrsComponents]
    lnsr: list[LnsrComponents]
    ifc: list[IfcComponents]
    forecasts: ForecastSet
    fit: irs_mod.InequalityFit | None


class GIEstimator(TransformerMixin, BaseEstimator):
    """Composite resilience index as a scikit-learn style transformer.

    ``fit(panel)`` computes every raw component for every country-year and
    fits percentile bounds per metric on the pooled sample. ``transform``
    scores a panel against those bounds and returns a :class:`GIResult`.
    """

    def __init__(
        self,
        window=5,
        q_low=0.05,
        q_high=0.95,
        gi_weights=(0.35, 0.35, 0.30),
        irs_weights=irs_mod.DEFAULT_WEIGHTS,
        lnsr_weights=lnsr_mod.DEFAULT_WEIGHTS,
        ifc_weights=ifc_mod.DEFAULT_WEIGHTS,
        epsilon_floor=0.0,
        min_obs=8,
        r_squared_scoring="pooled",
        mu_indicator=M3_GROWTH,
        t0=10.0,
        scale=1.0,
        zeta_smoothing_window=5,
        alpha_grid=ifc_mod.DEFAULT_ALPHA_GRID,
        validation_fraction=0.6,
        min_train=6,
        zeta_mode="abs",
        hmm_max_iter=200,
        hmm_tol=1e-8,
        random_state=0,
    ):
        self.window = window
        self.q_low = q_low
        self.q_high = q_high
        self.gi_weights = gi_weights
        self.irs_weights = irs_weights
        self.lnsr_weights = lnsr_weights
        self.ifc_weights = ifc_weights
        self.epsilon_floor = epsilon_floor
        self.min_obs = min_obs
        self.r_squared_scoring = r_squared_scoring
        self.mu_indicator = mu_indicator
        self.t0 = t0
        self.scale = scale
        self.zeta_smoothing_window = zeta_smoothing_window
        self.alpha_grid = alpha_grid
        self.validation_fraction = validation_fraction
        self.min_train = min_train
        self.zeta_mode = zeta_mode
        self.hmm_max_iter = hmm_max_iter
        self.hmm_tol = hmm_tol
        self.random_state = random_state

    def _validate_params(self):
        check_window(self.window, 3, "window")
        check_quantiles(self.q_low, self.q_high)
        check_weights(self.gi_weights, 3, "gi_weights")
        check_weights(self.irs_weights, 3, "irs_weights")
        check_weights(self.lnsr_weights, 3, "lnsr_weights")
        check_weights(self.ifc_weights, 4, "ifc_weights")
        if self.r_squared_scoring not in ("pooled", "direct"):
            raise ValueError("r_squared_scoring must be 'pooled' or 'direct'")
        if self.epsilon_floor < 0:
            raise ValueError("epsilon_floor must be non-negative")

    def _ifc_config(self) -> IfcConfig:
        return IfcConfig(
            window=self.window,
            min_train=self.min_train,
            t0=self.t0,
            scale=self.scale,
            smoothing_window=self.zeta_smoothing_window,
            alpha_grid=tuple(self.alpha_grid),
            validation_fraction=self.validation_fraction,
            zeta_mode=self.zeta_mode,
            hmm_seed=self.random_state,
            hmm_max_iter=self.hmm_max_iter,
            hmm_tol=self.hmm_tol,
        )

    def _inputs(self, panel: Panel) -> dict[str, _CountryInputs]:
        if not isinstance(panel, Panel):
            raise TypeError(f"expected a Panel, got {type(panel).__name__}")
        cached = getattr(self, "_cache", None)
        if cached is not None and cached[0] is panel and cached[1] == self.get_params():
            return cached[2]
        config = self._ifc_config()
        out: dict[str, _CountryInputs] = {}
        for country in panel.countries:
            fs, ifc_rows = ifc_mod.ifc_inputs(country, panel, config)
            out[country] = _CountryInputs(
                irs=irs_mod.irs_inputs(country, panel, self.min_obs, self.window),
                lnsr=lnsr_mod.lnsr_inputs(country, panel, self.window, self.mu_indicator),
                ifc=ifc_rows,
                forecasts=fs,
                fit=irs_mod.fit_inequality_model(country, panel, self.min_obs),
            )
        self._cache = (panel, self.get_params(), out)
        return out

    def fit(self, X: Panel, y=None):
        self._validate_params()
        inputs = self._inputs(X)
        pools: dict[str, list[float]] = {m: [] for m in METRICS}
        for ci in inputs.values():
            for rows, metrics in ((ci.irs, irs_mod.METRICS), (ci.lnsr, lnsr_mod.METRICS), (ci.ifc, ifc_mod.METRICS)):
                for row in rows:
                    for m, raw in zip(metrics, row.raw_metrics):
                        if raw is not None:
                            pools[m].append(raw)
        self.bounds_: dict[str, ScalingBounds] = {}
        for m, pool in pools.items():
            if m == "irs.r_squared" and self.r_squared_scoring == "direct":
                self.bounds_[m] = ScalingBounds(m, 0.0, 1.0, max(1, len(pool)), 0.0, 1.0)
            elif pool:
                self.bounds_[m] = fit_bounds(pool, m, self.q_low, self.q_high)
            else:
                logger.warning("metric %s has no observations; its component stays missing", m)
        self.n_country_years_ = sum(len(ci.irs) for ci in inputs.values())
        return self

    def transform(self, X: Panel) -> GIResult:
        check_is_fitted(self, "bounds_")
        inputs = self._inputs(X)
        weights = GiWeights(*self.gi_weights)
        records: list[CountryYear] = []
        for country in sorted(inputs):
            ci = inputs[country]
            irs_rows = [irs_mod.compute_irs(country, r.year, r, self.bounds_, self.irs_weights) for r in ci.irs]
            lnsr_rows = [lnsr_mod.score_lnsr(r, self.bounds_, self.lnsr_weights) for r in ci.lnsr]
            ifc_rows = [ifc_mod.compute_ifc(country, r.year, r, self.bounds_, self.ifc_weights) for r in ci.ifc]
            gi_rows = []
            for a, b, c in zip(irs_rows, lnsr_rows, ifc_rows):
                pillars = (a.irs, b.lnsr, c.ifc)
                gi = aggregate_gi(pillars, weights, self.epsilon_floor)
                gi_rows.append(GiRecord(country, a.year, gi, pillars, reason="" if gi is not None else "no_pillars"))
            gi_rows = attach_contributions(gi_rows, weights)
            records.extend(CountryYear(country, g.year, a, b, c, g) for a, b, c, g in zip(irs_rows, lnsr_rows, ifc_rows, gi_rows))
        return GIResult(
            records=records,
            bounds=dict(self.bounds_),
            forecasts={c: ci.forecasts for c, ci in inputs.items()},
            inequality_fits={c: ci.fit for c, ci in inputs.items()},
            weights={
                "gi": tuple(self.gi_weights),
                "irs": tuple(self.irs_weights),
                "lnsr": tuple(self.lnsr_weights),
                "ifc": tuple(self.ifc_weights),
            },
        )


def pillar_matrix(result: GIResult) -> np.ndarray:
    """``(n_records, 4)`` array of IRS, LNSR, IFC, GI with NaN for missing."""
    rows = [[np.nan if v is None else v for v in (*r.gi.pillars, r.gi.gi)] for r in result.records]
    return np.array(rows, dtype=float).reshape(-1, 4)
