"""Inflation forecast coherence pillar.

Three one-step-ahead inflation forecasters are compared on rolling RMSE:
an AR(1), an ARX(1) baseline on lagged growth and unemployment, and the
ARX baseline shifted by a loading on a centred zeta-function signal. Gains
of the augmented model, an HMM regime-classification accuracy and the
alignment of the zeta signal with inflation changes form the pillar.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from gindex._validation import check_weights, check_window, optional_float
from gindex.numerics.hmm import VARIANCE_FLOOR, hmm_decode, hmm_fit
from gindex.numerics.ols import SampleSizeError, SingularDesignError, ols_fit
from gindex.numerics.stats import rolling_corr, rolling_stat
from gindex.numerics.zeta import zeta_critical_line
from gindex.panel import GDP_GROWTH, INFLATION, UNEMPLOYMENT, Panel, TimeSeries, get_series
from gindex.scaling import ScalingBounds, score, weighted_mean_renormalized

logger = logging.getLogger(__name__)

METRICS = ("ifc.gain_fpas", "ifc.gain_ar", "ifc.hmm_accuracy", "ifc.zeta_match")
DEFAULT_WEIGHTS = (0.35, 0.25, 0.25, 0.15)
DEFAULT_ALPHA_GRID = tuple(k / 10 for k in range(-30, 31))


@dataclass(frozen=True)
class IfcConfig:
    window: int = 5
    min_train: int = 6
    t0: float = 10.0
    scale: float = 1.0
    smoothing_window: int = 5
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    validation_fraction: float = 0.6
    zeta_mode: str = "abs"
    hmm_seed: int = 0
    hmm_max_iter: int = 200
    hmm_tol: float = 1e-8
    hmm_variance_floor: float = VARIANCE_FLOOR

    def __post_init__(self):
        check_window(self.window, 3, "window")
        check_window(self.min_train, 3, "min_train")
        check_window(self.smoothing_window, 1, "smoothing_window")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not 0.0 < self.validation_fraction <= 1.0:
            raise ValueError("validation_fraction must lie in (0, 1]")
        if self.zeta_mode not in ("abs", "real"):
            raise ValueError("zeta_mode must be 'abs' or 'real'")
        if not self.alpha_grid:
            raise ValueError("alpha_grid must not be empty")


@dataclass(frozen=True, eq=False)
class ForecastSeries(TimeSeries):
    """One-step-ahead forecasts with an audit trail.

    ``training[t]`` lists the target years of the rows used to fit the
    model that produced the forecast for year ``t``; ``fallback_years``
    marks years where the ARX design was unusable and AR(1) stood in.
    """

    training: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    fallback_years: frozenset = frozenset()


@dataclass(frozen=True, eq=False)
class ZetaSignal:
    years: np.ndarray
    raw: np.ndarray
    reference: np.ndarray
    centered: np.ndarray
    t_star: np.ndarray
    t_star_base: float
    t_star_scale: float
    smoothing_window: int
    mode: str = "abs"

    def as_series(self) -> TimeSeries:
        return TimeSeries(self.years, self.centered)


@dataclass(frozen=True, eq=False)
class ForecastSet:
    country: str
    years: np.ndarray
    actual: TimeSeries
    ar1: ForecastSeries
    fpas: ForecastSeries
    fpas_zeta: ForecastSeries
    alpha: float
    signal: ZetaSignal
    validation: tuple[int, int] | None


@dataclass(frozen=True)
class IfcComponents:
    country: str
    year: int
    rmse_ar: float | None = None
    rmse_fpas: float | None = None
    rmse_fz: float | None = None
    d_fpas: float | None = None
    d_ar: float | None = None
    d_fpas_pos: float | None = None
    d_ar_pos: float | None = None
    hmm_acc: float | None = None
    zeta_match: float | None = None
    scores: tuple[float | None, ...] = (None, None, None, None)
    ifc: float | None = None

    def __post_init__(self):
        for name in ("d_fpas_pos", "d_ar_pos", "rmse_ar", "rmse_fpas", "rmse_fz"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def raw_metrics(self) -> tuple[float | None, ...]:
        return (self.d_fpas_pos, self.d_ar_pos, self.hmm_acc, self.zeta_match)


# -- forecasters --------------------------------------------------------------


def _fit_predict(X: np.ndarray, y: np.ndarray, x_new: np.ndarray) -> float:
    fit = ols_fit(X, y)
    return float(x_new @ fit.coefficients)


def _ar1_step(pi: np.ndarray, target: int, min_train: int):
    """AR(1) forecast for index ``target`` from rows strictly before it."""
    if target < 1 or np.isnan(pi[target - 1]):
        return None
    rows = [s for s in range(1, target) if not (np.isnan(pi[s]) or np.isnan(pi[s - 1]))]
    if len(rows) < min_train:
        return None
    idx = np.array(rows)
    y, lagged = pi[idx], pi[idx - 1]
    if np.ptp(lagged) == 0.0:
        # slope not identified; the best constant predictor is the target mean
        return float(y.mean()), rows
    X = np.column_stack([np.ones(idx.size), lagged])
    try:
        return _fit_predict(X, y, np.array([1.0, pi[target - 1]])), rows
    except SingularDesignError:
        return float(y.mean()), rows


def _require_contiguous(series: TimeSeries) -> None:
    if not series.is_contiguous:
        raise ValueError("forecasting needs a series over consecutive years")


def ar1_forecast(pi: TimeSeries, min_train: int = 3) -> ForecastSeries:
    """Expanding-window one-step AR(1) forecasts.

    The forecast for year ``t`` is fitted on rows ``(pi_{s-1}, pi_s)`` with
    ``s <= t - 1`` and needs at least ``min_train`` such rows.
    """
    min_train = check_window(min_train, 3, "min_train")
    _require_contiguous(pi)
    vals = pi.values
    out = np.full(vals.shape, np.nan)
    training: dict[int, tuple[int, ...]] = {}
    for t in range(1, vals.size):
        step = _ar1_step(vals, t, min_train)
        if step is not None:
            out[t] = step[0]
            training[int(pi.years[t])] = tuple(int(pi.years[s]) for s in step[1])
    return ForecastSeries(pi.years, out, training=training)


def fpas_arx_forecast(
    pi: TimeSeries, exog: Sequence[TimeSeries], min_train: int = 6
) -> ForecastSeries:
    """Expanding-window one-step ARX(1): ``pi_t ~ 1 + pi_{t-1} + exog_{t-1}``.

    Training rows need every lagged regressor observed. When the window
    design is singular, or an exogenous value at ``t - 1`` is missing, the
    year falls back to the AR(1) forecast and is flagged.
    """
    min_train = check_window(min_train, len(exog) + 4, "min_train")
    _require_contiguous(pi)
    for x in exog:
        if not np.array_equal(x.years, pi.years):
            raise ValueError("exogenous series must share the inflation series' years")
    vals = pi.values
    ex = np.column_stack([x.values for x in exog]) if exog else np.zeros((vals.size, 0))
    out = np.full(vals.shape, np.nan)
    training: dict[int, tuple[int, ...]] = {}
    fallback: set[int] = set()

    def usable(s: int) -> bool:
        return not (np.isnan(vals[s]) or np.isnan(vals[s - 1]) or np.isnan(ex[s - 1]).any())

    for t in range(1, vals.size):
        if np.isnan(vals[t - 1]):
            continue
        rows = [s for s in range(1, t) if usable(s)]
        if len(rows) < min_train:
            continue
        year = int(pi.years[t])
        idx = np.array(rows)
        X = np.column_stack([np.ones(idx.size), vals[idx - 1], ex[idx - 1]])
        x_new = np.concatenate([[1.0, vals[t - 1]], ex[t - 1]])
        forecast = None
        if not np.isnan(x_new).any():
            try:
                forecast = _fit_predict(X, vals[idx], x_new)
                training[year] = tuple(int(pi.years[s]) for s in rows)
            except (SingularDesignError, SampleSizeError):
                forecast = None
        if forecast is None:
            step = _ar1_step(vals, t, min_train)
            if step is None:
                continue
            forecast = step[0]
            training[year] = tuple(int(pi.years[s]) for s in step[1])
            fallback.add(year)
        out[t] = forecast
    return ForecastSeries(pi.years, out, training=training, fallback_years=frozenset(fallback))


# -- zeta augmentation --------------------------------------------------------


def build_zeta_signal(
    years: Sequence[int],
    t0: float = 10.0,
    scale: float = 1.0,
    smoothing_window: int = 5,
    mode: str = "abs",
) -> ZetaSignal:
    """Zeta values along ``t* = t0 + scale * (year - first_year)``, centred on a trailing mean.

    ``mode="abs"`` uses ``|zeta(0.5 + i t*)|``, ``mode="real"`` its real
    part. The reference level is the trailing mean of the last
    ``smoothing_window`` raw values (fewer at the start of the sample).
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    smoothing_window = check_window(smoothing_window, 1, "smoothing_window")
    years = np.asarray(years, dtype=int)
    if years.size == 0:
        raise ValueError("years must not be empty")
    t_star = t0 + scale * (years - years[0]).astype(float)
    values = [zeta_critical_line(t) for t in t_star]
    if mode == "abs":
        raw = np.array([abs(z) for z in values])
    elif mode == "real":
        raw = np.array([z.real for z in values])
    else:
        raise ValueError("mode must be 'abs' or 'real'")
    reference = np.array(
        [raw[max(0, i - smoothing_window + 1) : i + 1].mean() for i in range(raw.size)]
    )
    return ZetaSignal(years, raw, reference, raw - reference, t_star, float(t0), float(scale), smoothing_window, mode)


def _centered_at(signal: ZetaSignal, years: np.ndarray) -> np.ndarray:
    lookup = dict(zip(signal.years.tolist(), signal.centered.tolist()))
    return np.array([lookup.get(int(y), np.nan) for y in years])


def _rmse(errors: np.ndarray) -> float:
    return math.sqrt(float(np.mean(errors * errors)))


def calibrate_alpha(
    fpas: TimeSeries,
    signal: ZetaSignal,
    actual: TimeSeries,
    validation: tuple[int, int],
    grid: Sequence[float] = DEFAULT_ALPHA_GRID,
) -> float:
    """Grid value of the zeta loading minimising validation RMSE.

    Ties (RMSE equal to within 1e-12 relative) go to the smallest ``|alpha|``,
    then to the negative value. Fewer than three usable validation years
    return 0.
    """
    if not grid:
        raise ValueError("grid must not be empty")
    lo, hi = validation
    years = actual.years
    centered = _centered_at(signal, years)
    mask = (years >= lo) & (years <= hi) & actual.present & fpas.present & ~np.isnan(centered)
    if mask.sum() < 3:
        logger.warning("alpha calibration: %d usable validation years < 3, alpha set to 0", int(mask.sum()))
        return 0.0
    resid = actual.values[mask] - fpas.values[mask]
    c = centered[mask]
    losses = [(_rmse(resid - a * c), float(a)) for a in grid]
    best = min(loss for loss, _ in losses)
    tied = [a for loss, a in losses if loss <= best + 1e-12 * max(1.0, best)]
    return min(tied, key=lambda a: (abs(a), a))


def fpas_zeta_forecast(fpas: ForecastSeries, signal: ZetaSignal, alpha: float) -> ForecastSeries:
    """Shift the baseline forecast by ``alpha`` times the centred signal."""
    centered = _centered_at(signal, fpas.years)
    values = fpas.values + alpha * np.where(np.isnan(centered), 0.0, centered)
    values = np.where(fpas.present & ~np.isnan(centered), values, np.nan)
    return ForecastSeries(fpas.years, values, training=fpas.training, fallback_years=fpas.fallback_years)


# -- evaluation ---------------------------------------------------------------


def rolling_rmse(actual: TimeSeries, forecast: TimeSeries, window: int = 5) -> TimeSeries:
    """Root mean squared one-step error over each complete trailing window."""
    if not np.array_equal(actual.years, forecast.years):
        raise ValueError("actual and forecast must share years")
    errors = actual.with_values(actual.values - forecast.values)
    return rolling_stat(errors, check_window(window, 1), "rms")


def delta_rmse(rmse_base: float, rmse_new: float) -> float | None:
    """Percent RMSE improvement of ``rmse_new`` over ``rmse_base``.

    A zero baseline gives 0 when the new RMSE is also 0, otherwise ``None``.
    """
    if rmse_base < 0 or rmse_new < 0:
        raise ValueError("RMSE values must be non-negative")
    if rmse_base == 0:
        if rmse_new == 0:
            return 0.0
        logger.warning("zero baseline RMSE against positive new RMSE; improvement left missing")
        return None
    return 100.0 * (rmse_base - rmse_new) / rmse_base


def truncate_gain(delta: float) -> float:
    return max(0.0, delta)


def regime_accuracy(
    pi: TimeSeries,
    window: int = 5,
    n_states: int = 2,
    max_iter: int = 200,
    tol: float = 1e-8,
    variance_floor: float = VARIANCE_FLOOR,
    seed: int = 0,
) -> TimeSeries:
    """Rolling agreement between Viterbi regimes and a median-split reference.

    The HMM is fitted once on the observed inflation history; the
    high-mean state is the high-inflation regime and the reference marks
    years with inflation above the sample median. Missing when the HMM is
    degenerate or there are too few observations.
    """
    window = check_window(window, 1)
    _require_contiguous(pi)
    present = pi.present
    x = pi.values[present]
    empty = TimeSeries.empty_like(pi)
    if x.size < 2 * n_states:
        logger.info("regime accuracy: %d observations, too few for an HMM", x.size)
        return empty
    model = hmm_fit(x, n_states=n_states, max_iter=max_iter, tol=tol, variance_floor=variance_floor, seed=seed)
    if model.degenerate:
        logger.warning("regime accuracy: degenerate HMM (constant inflation), left missing")
        return empty
    states = hmm_decode(model, x)
    high_state = states == (n_states - 1)
    reference = x > np.median(x)
    agree = np.full(pi.values.shape, np.nan)
    agree[present] = (high_state == reference).astype(float)
    return rolling_stat(pi.with_values(agree), window, "mean")


def zeta_match(signal: ZetaSignal, pi: TimeSeries, window: int = 5) -> TimeSeries:
    """``|corr(centred zeta signal, change in inflation)|`` over trailing windows."""
    centered = pi.with_values(_centered_at(signal, pi.years))
    corr = rolling_corr(centered, pi.diff(), check_window(window, 3))
    return corr.with_values(np.abs(corr.values))


def ifc_from_scores(scores, weights=DEFAULT_WEIGHTS) -> float | None:
    weights = check_weights(weights, 4, "IFC weights")
    return weighted_mean_renormalized(zip(scores, weights))


def compute_ifc(
    country: str,
    year: int,
    components: IfcComponents,
    bounds: Mapping[str, ScalingBounds],
    weights=DEFAULT_WEIGHTS,
) -> IfcComponents:
    scores = tuple(
        None if raw is None or bounds.get(m) is None else score(raw, bounds[m])
        for raw, m in zip(components.raw_metrics, METRICS)
    )
    return replace(components, country=country, year=year, scores=scores, ifc=ifc_from_scores(scores, weights))


def _common_sample(actual: TimeSeries, *forecasts: TimeSeries) -> np.ndarray:
    mask = actual.present.copy()
    for f in forecasts:
        mask &= f.present
    return mask


def forecast_set(country: str, panel: Panel, config: IfcConfig = IfcConfig()) -> ForecastSet:
    """Run the three forecasters and calibrate the zeta loading for one country."""
    pi = get_series(panel, country, INFLATION)
    g = get_series(panel, country, GDP_GROWTH)
    u = get_series(panel, country, UNEMPLOYMENT)
    ar1 = ar1_forecast(pi, config.min_train)
    fpas = fpas_arx_forecast(pi, [g, u], config.min_train)
    signal = build_zeta_signal(pi.years, config.t0, config.scale, config.smoothing_window, config.zeta_mode)

    forecastable = pi.years[pi.present & fpas.present]
    n_val = int(math.floor(config.validation_fraction * forecastable.size))
    if n_val >= 3:
        validation = (int(forecastable[0]), int(forecastable[n_val - 1]))
        alpha = calibrate_alpha(fpas, signal, pi, validation, config.alpha_grid)
    else:
        logger.warning("%s: %d forecastable years, zeta loading fixed at 0", country, forecastable.size)
        validation, alpha = None, 0.0
    fz = fpas_zeta_forecast(fpas, signal, alpha)
    return ForecastSet(country, pi.years, pi, ar1, fpas, fz, alpha, signal, validation)


def ifc_inputs(country: str, panel: Panel, config: IfcConfig = IfcConfig()) -> tuple[ForecastSet, list[IfcComponents]]:
    """Unscored IFC diagnostics per year, plus the forecasts behind them.

    Rolling RMSEs of the three models are computed on their common sample
    (years where the actual value and every forecast exist).
    """
    fs = forecast_set(country, panel, config)
    pi = fs.actual
    common = _common_sample(pi, fs.ar1, fs.fpas, fs.fpas_zeta)

    def masked(f: TimeSeries) -> TimeSeries:
        return f.with_values(np.where(common, f.values, np.nan))

    rmse = {
        name: rolling_rmse(masked(pi), masked(f), config.window).values
        for name, f in (("ar", fs.ar1), ("fpas", fs.fpas), ("fz", fs.fpas_zeta))
    }
    acc = regime_accuracy(
        pi,
        config.window,
        max_iter=config.hmm_max_iter,
        tol=config.hmm_tol,
        variance_floor=config.hmm_variance_floor,
        seed=config.hmm_seed,
    ).values
    match = zeta_match(fs.signal, pi, config.window).values

    rows = []
    for i, year in enumerate(int(y) for y in pi.years):
        r_ar, r_fpas, r_fz = (optional_float(rmse[k][i]) for k in ("ar", "fpas", "fz"))
        d_fpas = None if r_fpas is None or r_fz is None else delta_rmse(r_fpas, r_fz)
        d_ar = None if r_ar is None or r_fz is None else delta_rmse(r_ar, r_fz)
        rows.append(
            IfcComponents(
                country=country,
                year=year,
                rmse_ar=r_ar,
                rmse_fpas=r_fpas,
                rmse_fz=r_fz,
                d_fpas=d_fpas,
                d_ar=d_ar,
                d_fpas_pos=None if d_fpas is None else truncate_gain(d_fpas),
                d_ar_pos=None if d_ar is None else truncate_gain(d_ar),
                hmm_acc=optional_float(acc[i]),
                zeta_match=optional_float(match[i]),
            )
        )
    return fs, rows
