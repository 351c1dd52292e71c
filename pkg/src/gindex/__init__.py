"""gindex: composite macro-financial resilience index (GI) with three pillars.

IRS scores the stability of inequality dynamics, LNSR the stability of
liquidity transmission and IFC the coherence of inflation forecasts. GI is
their weighted geometric mean on a 0-100 scale.
"""

__version__ = "0.1.0"

from gindex.composite import GiRecord, GiWeights, aggregate_gi, decompose_dlog, descriptive_stats, regional_mean
from gindex.panel import Panel, TimeSeries, load_panel, parse_panel_csv
from gindex.pipeline import GIEstimator, GIResult
from gindex.scaling import PercentileScaler, ScalingBounds, fit_bounds, score
from gindex.scenario import (
    ScenarioSpec,
    apply_shock,
    binding_pillar,
    build_scenario_paths,
    classify_band,
    interpolate_baseline,
)

__all__ = [
    "GIEstimator",
    "GIResult",
    "GiRecord",
    "GiWeights",
    "Panel",
    "PercentileScaler",
    "ScalingBounds",
    "ScenarioSpec",
    "TimeSeries",
    "aggregate_gi",
    "apply_shock",
    "binding_pillar",
    "build_scenario_paths",
    "classify_band",
    "decompose_dlog",
    "descriptive_stats",
    "fit_bounds",
    "interpolate_baseline",
    "load_panel",
    "parse_panel_csv",
    "regional_mean",
    "score",
]
