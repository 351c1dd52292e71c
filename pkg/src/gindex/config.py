"""Run configuration: TOML schema, defaults and validation.

Every section and key is optional; unknown sections or keys are errors.

.. code-block:: toml

    [run]
    cutoff = 2024
    format = "csv"            # csv | json | both
    seed = 0
    window = 5
    raw_precision = false
    mode = "recompute_gi"     # or table_replication

    [scaling]
    q_low = 0.05
    q_high = 0.95
    r_squared = "pooled"      # or direct

    [weights]
    gi = [0.35, 0.35, 0.30]
    irs = [0.40, 0.40, 0.20]
    lnsr = [0.35, 0.35, 0.30]
    ifc = [0.35, 0.25, 0.25, 0.15]
    epsilon_floor = 0.0

    [irs]
    min_obs = 8

    [lnsr]
    mu = "DERIVED.M3_GROWTH"  # any registered indicator code

    [ifc]
    min_train = 6
    t0 = 10.0
    scale = 1.0
    smoothing_window = 5
    alpha_grid = {start = -3.0, stop = 3.0, step = 0.1}   # or an explicit list
    validation_fraction = 0.6
    zeta_mode = "abs"
    hmm_max_iter = 200
    hmm_tol = 1e-8

    [regions.ECS]
    members = ["ARM", "AZE", "GEO"]

    [scenario]
    endpoints = "endpoints.csv"   # relative to the config file

    [scenario.shocks.Adverse]
    pillar = [-5.0, -6.0, -7.0, -7.5, -8.0]
    gi = [-4.0, -5.0, -6.0, -6.5, -7.0]
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from gindex import ifc as ifc_mod
from gindex import irs as irs_mod
from gindex import lnsr as lnsr_mod
from gindex.panel import DEFAULT_REGISTRY, DERIVED_CODES, M3_GROWTH
from gindex.scenario import DEFAULT_SCENARIOS, HORIZON, MODES, ScenarioSpec

FORMATS = ("csv", "json", "both")

ALL_ECONOMIES = ("ARM", "AZE", "CHN", "GEO", "ROU", "RUS", "TUR", "UKR", "USA")
DEFAULT_REGIONS: dict[str, tuple[str, ...]] = {
    "WLD": ALL_ECONOMIES,
    "ECS": ("ARM", "AZE", "GEO", "ROU", "RUS", "TUR", "UKR"),
    "EAS": ("CHN",),
    "NAC": ("USA",),
    "EUU": ("ROU",),
    "LCN": (),
    "MEA": (),
    "SAS": (),
    "SSF": (),
}


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""


@dataclass(frozen=True)
class RunConfig:
    cutoff: int = 2024
    format: str = "csv"
    seed: int = 0
    window: int = 5
    raw_precision: bool = False
    mode: str = "recompute_gi"
    q_low: float = 0.05
    q_high: float = 0.95
    r_squared_scoring: str = "pooled"
    gi_weights: tuple[float, ...] = (0.35, 0.35, 0.30)
    irs_weights: tuple[float, ...] = irs_mod.DEFAULT_WEIGHTS
    lnsr_weights: tuple[float, ...] = lnsr_mod.DEFAULT_WEIGHTS
    ifc_weights: tuple[float, ...] = ifc_mod.DEFAULT_WEIGHTS
    epsilon_floor: float = 0.0
    min_obs: int = 8
    mu_indicator: str = M3_GROWTH
    min_train: int = 6
    t0: float = 10.0
    scale: float = 1.0
    zeta_smoothing_window: int = 5
    alpha_grid: tuple[float, ...] = ifc_mod.DEFAULT_ALPHA_GRID
    validation_fraction: float = 0.6
    zeta_mode: str = "abs"
    hmm_max_iter: int = 200
    hmm_tol: float = 1e-8
    regions: Mapping[str, tuple[str, ...]] = field(default_factory=lambda: dict(DEFAULT_REGIONS))
    endpoints: str | None = None
    scenarios: tuple[ScenarioSpec, ...] = DEFAULT_SCENARIOS

    def __post_init__(self):
        _check(self.format in FORMATS, f"run.format must be one of {FORMATS}")
        _check(self.mode in MODES, f"run.mode must be one of {MODES}")
        _check(1900 <= self.cutoff <= 2100, "run.cutoff must be a year between 1900 and 2100")
        _check(self.window >= 3, "run.window must be >= 3")
        _check(0.0 <= self.q_low < self.q_high <= 1.0, "scaling quantiles must satisfy 0 <= q_low < q_high <= 1")
        _check(self.r_squared_scoring in ("pooled", "direct"), "scaling.r_squared must be 'pooled' or 'direct'")
        for name, n in (("gi", 3), ("irs", 3), ("lnsr", 3), ("ifc", 4)):
            w = getattr(self, f"{name}_weights")
            _check(len(w) == n, f"weights.{name} must have {n} entries")
            _check(all(math.isfinite(x) and x > 0 for x in w), f"weights.{name} must be positive")
        _check(math.isfinite(self.epsilon_floor) and 0 <= self.epsilon_floor < 100, "weights.epsilon_floor must lie in [0, 100)")
        _check(self.min_obs >= 6, "irs.min_obs must be >= 6")
        _check(
            self.mu_indicator in DEFAULT_REGISTRY or self.mu_indicator in DERIVED_CODES,
            f"lnsr.mu {self.mu_indicator!r} is not a registered indicator",
        )
        _check(self.min_train >= 6, "ifc.min_train must be >= 6")
        _check(self.scale > 0 and math.isfinite(self.t0), "ifc.scale must be positive and ifc.t0 finite")
        _check(self.zeta_smoothing_window >= 1, "ifc.smoothing_window must be >= 1")
        _check(len(self.alpha_grid) > 0, "ifc.alpha_grid must not be empty")
        _check(0 < self.validation_fraction <= 1, "ifc.validation_fraction must lie in (0, 1]")
        _check(self.zeta_mode in ("abs", "real"), "ifc.zeta_mode must be 'abs' or 'real'")
        _check(self.hmm_max_iter >= 1 and self.hmm_tol > 0, "ifc.hmm_max_iter and ifc.hmm_tol must be positive")

    def estimator_params(self) -> dict[str, Any]:
        """Keyword arguments for :class:`gindex.pipeline.GIEstimator`."""
        return dict(
            window=self.window,
            q_low=self.q_low,
            q_high=self.q_high,
            gi_weights=self.gi_weights,
            irs_weights=self.irs_weights,
            lnsr_weights=self.lnsr_weights,
            ifc_weights=self.ifc_weights,
            epsilon_floor=self.epsilon_floor,
            min_obs=self.min_obs,
            r_squared_scoring=self.r_squared_scoring,
            mu_indicator=self.mu_indicator,
            t0=self.t0,
            scale=self.scale,
            zeta_smoothing_window=self.zeta_smoothing_window,
            alpha_grid=self.alpha_grid,
            validation_fraction=self.validation_fraction,
            min_train=self.min_train,
            zeta_mode=self.zeta_mode,
            hmm_max_iter=self.hmm_max_iter,
            hmm_tol=self.hmm_tol,
            random_state=self.seed,
        )

    def flat(self) -> dict[str, Any]:
        """JSON-ready ``{key: value}`` echo with stable ordering."""
        out: dict[str, Any] = {}
        for key, value in asdict(self).items():
            if key == "scenarios":
                for spec in self.scenarios:
                    out[f"scenario.{spec.name}.pillar_shocks"] = list(spec.pillar_shocks)
                    out[f"scenario.{spec.name}.gi_shocks"] = list(spec.gi_shocks)
                    out[f"scenario.{spec.name}.horizon"] = list(spec.horizon)
            elif key == "regions":
                for region in sorted(value):
                    out[f"regions.{region}"] = list(value[region])
            elif isinstance(value, tuple):
                out[key] = list(value)
            else:
                out[key] = value
        return dict(sorted(out.items()))

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _typed(value, kind, where: str):
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        return float(value) if ok else _fail(where, "a number")
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
        return value if ok else _fail(where, "an integer")
    if kind is bool:
        return value if isinstance(value, bool) else _fail(where, "true or false")
    if kind is str:
        return value if isinstance(value, str) else _fail(where, "a string")
    if kind == "floats":
        if not isinstance(value, list):
            _fail(where, "a list of numbers")
        return tuple(_typed(v, float, where) for v in value)
    if kind == "codes":
        if not isinstance(value, list):
            _fail(where, "a list of country codes")
        return tuple(_typed(v, str, where).strip().upper() for v in value)
    raise AssertionError(kind)


def _fail(where: str, expected: str):
    raise ConfigError(f"{where} must be {expected}")


# section -> key -> (RunConfig field, type)
_SCHEMA: dict[str, dict[str, tuple[str, Any]]] = {
    "run": {
        "cutoff": ("cutoff", int),
        "format": ("format", str),
        "seed": ("seed", int),
        "window": ("window", int),
        "raw_precision": ("raw_precision", bool),
        "mode": ("mode", str),
    },
    "scaling": {
        "q_low": ("q_low", float),
        "q_high": ("q_high", float),
        "r_squared": ("r_squared_scoring", str),
    },
    "weights": {
        "gi": ("gi_weights", "floats"),
        "irs": ("irs_weights", "floats"),
        "lnsr": ("lnsr_weights", "floats"),
        "ifc": ("ifc_weights", "floats"),
        "epsilon_floor": ("epsilon_floor", float),
    },
    "irs": {"min_obs": ("min_obs", int)},
    "lnsr": {"mu": ("mu_indicator", str)},
    "ifc": {
        "min_train": ("min_train", int),
        "t0": ("t0", float),
        "scale": ("scale", float),
        "smoothing_window": ("zeta_smoothing_window", int),
        "validation_fraction": ("validation_fraction", float),
        "zeta_mode": ("zeta_mode", str),
        "hmm_max_iter": ("hmm_max_iter", int),
        "hmm_tol": ("hmm_tol", float),
    },
}


def _alpha_grid(value) -> tuple[float, ...]:
    if isinstance(value, list):
        return _typed(value, "floats", "ifc.alpha_grid")
    if not isinstance(value, dict) or set(value) != {"start", "stop", "step"}:
        raise ConfigError("ifc.alpha_grid must be a list or a table with start, stop, step")
    start, stop, step = (_typed(value[k], float, f"ifc.alpha_grid.{k}") for k in ("start", "stop", "step"))
    _check(step > 0 and stop >= start, "ifc.alpha_grid needs step > 0 and stop >= start")
    n = int(round((stop - start) / step))
    _check(n <= 100_000, "ifc.alpha_grid is too large")
    return tuple(round(start + k * step, 12) for k in range(n + 1))


def _regions(value) -> dict[str, tuple[str, ...]]:
    if not isinstance(value, dict):
        raise ConfigError("[regions] must be a table")
    out = {}
    for code, body in value.items():
        if not isinstance(body, dict) or set(body) - {"members"}:
            raise ConfigError(f"regions.{code} accepts only 'members'")
        out[code] = _typed(body.get("members", []), "codes", f"regions.{code}.members")
    return out


def _scenarios(value, base_dir: Path | None) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError("[scenario] must be a table")
    unknown = set(value) - {"endpoints", "mode", "horizon", "shocks"}
    if unknown:
        raise ConfigError(f"unknown key(s) in [scenario]: {', '.join(sorted(unknown))}")
    out: dict[str, Any] = {}
    if "endpoints" in value:
        path = Path(_typed(value["endpoints"], str, "scenario.endpoints"))
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        out["endpoints"] = str(path)
    if "mode" in value:
        out["mode"] = _typed(value["mode"], str, "scenario.mode")
    horizon = HORIZON
    if "horizon" in value:
        h = value["horizon"]
        if not (isinstance(h, list) and len(h) == 2 and all(isinstance(y, int) for y in h) and h[0] < h[1]):
            raise ConfigError("scenario.horizon must be [first_year, last_year]")
        horizon = tuple(range(h[0], h[1] + 1))
    shocks = value.get("shocks")
    if shocks is None:
        if horizon != HORIZON:
            raise ConfigError("a custom scenario.horizon needs explicit [scenario.shocks.*] tables")
        return out
    if not isinstance(shocks, dict):
        raise ConfigError("scenario.shocks must be a table of named scenarios")
    specs = [ScenarioSpec("Baseline", horizon=horizon)] if "Baseline" not in shocks else []
    for name, body in shocks.items():
        if not isinstance(body, dict) or set(body) - {"pillar", "gi"}:
            raise ConfigError(f"scenario.shocks.{name} accepts only 'pillar' and 'gi'")
        zero = [0.0] * len(horizon)
        pillar = _typed(body.get("pillar", zero), "floats", f"scenario.shocks.{name}.pillar")
        gi = _typed(body.get("gi", list(pillar)), "floats", f"scenario.shocks.{name}.gi")
        try:
            specs.append(ScenarioSpec(name, pillar, gi, horizon))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    out["scenarios"] = tuple(specs)
    return out


def config_from_mapping(data: Mapping[str, Any], base_dir: Path | None = None) -> RunConfig:
    """Validate a parsed TOML document and build a :class:`RunConfig`."""
    kwargs: dict[str, Any] = {}
    for section, body in data.items():
        if section == "regions":
            kwargs["regions"] = _regions(body)
            continue
        if section == "scenario":
            kwargs.update(_scenarios(body, base_dir))
            continue
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in body.items():
            if section == "ifc" and key == "alpha_grid":
                kwargs["alpha_grid"] = _alpha_grid(value)
                continue
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            target, kind = _SCHEMA[section][key]
            kwargs[target] = _typed(value, kind, f"{section}.{key}")
    return RunConfig(**kwargs)


def load_config(path=None) -> RunConfig:
    """Read a TOML config file; ``None`` gives the defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_mapping(data, base_dir=path.parent)
