"""2026-2030 scenario pathways, band labels and binding-pillar diagnostics.

Baseline paths interpolate linearly between 2026 and 2030 endpoints; a
scenario adds a per-year shock and clips to ``[0, 100]``. Two ways of
producing the composite path are offered:

``recompute_gi``
    aggregate the shocked pillars with the geometric composite;
``table_replication``
    interpolate the composite endpoints and shock the composite directly,
    with its own shock schedule.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from gindex._validation import is_missing
from gindex.composite import GiWeights, aggregate_gi

logger = logging.getLogger(__name__)

START_YEAR = 2026
END_YEAR = 2030
HORIZON = tuple(range(START_YEAR, END_YEAR + 1))
MODES = ("recompute_gi", "table_replication")
BANDS = ((0.0, 25.0, "0–25"), (25.0, 50.0, "25–50"), (50.0, 75.0, "50–75"), (75.0, 100.0, "75–100"))
PILLAR_ORDER = ("IRS", "LNSR", "IFC")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    pillar_shocks: tuple[float, ...] = (0.0,) * len(HORIZON)
    gi_shocks: tuple[float, ...] = (0.0,) * len(HORIZON)
    horizon: tuple[int, ...] = HORIZON

    def __post_init__(self):
        object.__setattr__(self, "pillar_shocks", tuple(float(s) for s in self.pillar_shocks))
        object.__setattr__(self, "gi_shocks", tuple(float(s) for s in self.gi_shocks))
        object.__setattr__(self, "horizon", tuple(int(y) for y in self.horizon))
        n = len(self.horizon)
        if len(self.pillar_shocks) != n or len(self.gi_shocks) != n:
            raise ValueError(f"scenario {self.name!r}: shock lists must cover all {n} horizon years")
        if self.name == "Baseline" and any(self.pillar_shocks + self.gi_shocks):
            raise ValueError("Baseline shocks must all be zero")


BASELINE = ScenarioSpec("Baseline")
ADVERSE = ScenarioSpec(
    "Adverse",
    pillar_shocks=(-5.0, -6.0, -7.0, -7.5, -8.0),
    gi_shocks=(-4.0, -5.0, -6.0, -6.5, -7.0),
)
OPTIMISTIC = ScenarioSpec(
    "Optimistic",
    pillar_shocks=(4.0, 4.5, 5.0, 5.5, 6.0),
    gi_shocks=(4.0, 4.5, 5.0, 5.5, 6.0),
)
DEFAULT_SCENARIOS = (BASELINE, ADVERSE, OPTIMISTIC)


@dataclass(frozen=True)
class ScenarioEndpoints:
    """2026 and 2030 anchor values; any pair may be ``None`` when unknown."""

    country: str
    irs: tuple[float, float] | None = None
    lnsr: tuple[float, float] | None = None
    ifc: tuple[float, float] | None = None
    gi: tuple[float, float] | None = None

    def pillars(self):
        return (self.irs, self.lnsr, self.ifc)


@dataclass(frozen=True)
class ScenarioYear:
    year: int
    gi: float | None
    band: str | None
    irs: float
    lnsr: float
    ifc: float
    binding_pillar: str
    binding_score: float


@dataclass(frozen=True)
class ScenarioPath:
    country: str
    scenario: str
    mode: str
    rows: tuple[ScenarioYear, ...]


@dataclass
class ScenarioRun:
    paths: list[ScenarioPath] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)


def interpolate_baseline(v_start: float, v_end: float, year: int, start: int = START_YEAR, end: int = END_YEAR) -> float:
    """Linear path from ``v_start`` in ``start`` to ``v_end`` in ``end``."""
    if not start <= year <= end:
        raise ValueError(f"year {year} outside the projection horizon {start}-{end}")
    return v_start + (year - start) / (end - start) * (v_end - v_start)


def apply_shock(base: float, shock: float) -> float:
    return min(100.0, max(0.0, base + shock))


def binding_pillar(irs: float | None, lnsr: float | None, ifc: float | None) -> tuple[str, float] | None:
    """Weakest pillar and its score; ties resolve in IRS, LNSR, IFC order.

    ``None`` when any pillar is missing.
    """
    values = (irs, lnsr, ifc)
    if any(is_missing(v) for v in values):
        return None
    best = 0
    for i in (1, 2):
        if values[i] < values[best]:
            best = i
    return PILLAR_ORDER[best], float(values[best])


def classify_band(gi: float) -> str:
    """Label on half-open quarters of the scale; 100 belongs to the top band."""
    if is_missing(gi) or not 0.0 <= gi <= 100.0:
        raise ValueError(f"GI {gi} outside [0, 100]")
    for lo, hi, label in BANDS:
        if lo <= gi < hi:
            return label
    return BANDS[-1][2]


def build_scenario_paths(
    endpoints: Iterable[ScenarioEndpoints],
    specs: Sequence[ScenarioSpec] = DEFAULT_SCENARIOS,
    mode: str = "recompute_gi",
    weights: GiWeights = GiWeights(),
    epsilon_floor: float = 0.0,
) -> ScenarioRun:
    """Project every country under every scenario.

    Countries with missing pillar endpoints (or, in ``table_replication``
    mode, missing composite endpoints) are skipped and listed in
    ``ScenarioRun.skipped``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    run = ScenarioRun()
    for ep in endpoints:
        missing = [name for name, pair in zip(PILLAR_ORDER, ep.pillars()) if pair is None]
        if missing:
            run.skipped.append((ep.country, "missing_endpoints:" + ",".join(missing)))
            logger.warning("%s: missing pillar endpoints %s, skipped", ep.country, missing)
            continue
        if mode == "table_replication" and ep.gi is None:
            run.skipped.append((ep.country, "missing_endpoints:GI"))
            logger.warning("%s: no composite endpoints for table replication, skipped", ep.country)
            continue
        for spec in specs:
            start, end = spec.horizon[0], spec.horizon[-1]
            rows = []
            for k, year in enumerate(spec.horizon):
                shocked = [
                    apply_shock(interpolate_baseline(a, b, year, start, end), spec.pillar_shocks[k])
                    for a, b in ep.pillars()
                ]
                if mode == "recompute_gi":
                    gi = aggregate_gi(shocked, weights, epsilon_floor)
                else:
                    gi = apply_shock(interpolate_baseline(*ep.gi, year, start, end), spec.gi_shocks[k])
                name, value = binding_pillar(*shocked)
                rows.append(
                    ScenarioYear(year, gi, None if gi is None else classify_band(gi), *shocked, name, value)
                )
            run.paths.append(ScenarioPath(ep.country, spec.name, mode, tuple(rows)))
    return run


_ENDPOINT_COLUMNS = ("country", "pillar", "value_start", "value_end")


def read_endpoints(source) -> list[ScenarioEndpoints]:
    """Read endpoints from CSV with columns ``country,pillar,value_start,value_end``.

    ``pillar`` is one of IRS, LNSR, IFC, GI; blank values mean unknown.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8-sig")
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8-sig")
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != _ENDPOINT_COLUMNS:
        raise ValueError(f"endpoint file must have columns {','.join(_ENDPOINT_COLUMNS)}")
    table: dict[str, dict[str, tuple[float, float] | None]] = {}
    for row in reader:
        country = row["country"].strip()
        pillar = row["pillar"].strip().upper()
        if pillar not in PILLAR_ORDER + ("GI",):
            raise ValueError(f"line {reader.line_num}: unknown pillar {pillar!r}")
        a, b = row["value_start"].strip(), row["value_end"].strip()
        pair = (float(a), float(b)) if a and b else None
        table.setdefault(country, {})[pillar.lower()] = pair
    return [ScenarioEndpoints(country, **fields) for country, fields in table.items()]


def shock_schedule(scenario_rows: Mapping[int, float], baseline_rows: Mapping[int, float]) -> tuple[float, ...]:
    """Per-year offset of a scenario path from its baseline."""
    return tuple(scenario_rows[y] - baseline_rows[y] for y in sorted(baseline_rows))
