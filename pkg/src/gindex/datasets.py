"""Bundled data: a deterministic synthetic panel and default scenario endpoints.

The synthetic panel covers nine economies over 2005-2024 in the long CSV
layout read by :func:`gindex.panel.parse_panel_csv`. It exercises the
awkward cases on purpose: one economy has no Gini at all, two have sparse
Gini, some report broad money as a level and others as a growth rate, and
a few cells are blank.
"""

from __future__ import annotations

import csv
import io
from importlib import resources
from pathlib import Path

import numpy as np

from gindex.panel import (
    BROAD_MONEY_GDP,
    BROAD_MONEY_GROWTH,
    BROAD_MONEY_LEVEL,
    GDP_GROWTH,
    GDP_PER_CAPITA,
    GINI,
    HEADER,
    INFLATION,
    UNEMPLOYMENT,
    Panel,
    load_panel,
)
from gindex.scenario import ScenarioEndpoints, read_endpoints

SYNTHETIC_SEED = 20240601
SYNTHETIC_YEARS = tuple(range(2005, 2025))
SYNTHETIC_FILE = "synthetic_panel.csv"
ENDPOINTS_FILE = "scenario_endpoints.csv"

# iso3: (name, mean inflation, mean growth, mean unemployment, broad money % GDP in 2005,
#        GDP per capita in 2005, Gini level, Gini availability, broad money reporting)
_PROFILES = {
    "ARM": ("Armenia", 4.0, 4.5, 17.0, 20.0, 1600.0, 31.0, "full", "level"),
    "AZE": ("Azerbaijan", 6.0, 5.0, 6.0, 15.0, 1500.0, None, "none", "growth"),
    "CHN": ("China", 2.5, 8.0, 4.5, 150.0, 1750.0, 40.0, "sparse", "growth"),
    "GEO": ("Georgia", 5.0, 5.5, 14.0, 18.0, 1650.0, 38.0, "full", "level"),
    "ROU": ("Romania", 4.5, 3.0, 6.5, 35.0, 4600.0, 35.0, "full", "growth"),
    "RUS": ("Russian Federation", 8.0, 2.0, 6.0, 30.0, 5300.0, 39.0, "full", "growth"),
    "TUR": ("Turkiye", 15.0, 5.0, 10.5, 40.0, 7100.0, 42.0, "gappy", "level"),
    "UKR": ("Ukraine", 11.0, 1.0, 8.5, 45.0, 1850.0, 26.0, "sparse", "growth"),
    "USA": ("United States", 2.3, 2.0, 5.8, 70.0, 44000.0, 41.0, "full", "growth"),
}
_SHOCK_YEARS = {2008: (4.0, -3.0), 2009: (-2.0, -5.0), 2015: (3.0, -1.5), 2020: (-1.0, -6.0), 2022: (7.0, -1.0)}


def _gini_mask(kind: str, rng: np.random.Generator, n: int) -> np.ndarray:
    if kind == "full":
        return np.ones(n, dtype=bool)
    if kind == "none":
        return np.zeros(n, dtype=bool)
    if kind == "sparse":
        mask = np.zeros(n, dtype=bool)
        mask[::2] = True
        return mask
    mask = rng.random(n) > 0.2
    mask[:3] = True
    return mask


def make_synthetic_panel(seed: int = SYNTHETIC_SEED) -> str:
    """Generate the synthetic panel as CSV text (values rounded to 4 decimals)."""
    rng = np.random.default_rng(seed)
    n = len(SYNTHETIC_YEARS)
    rows: list[tuple[str, str, int, str, float | None]] = []
    for iso, (name, pi0, g0, u0, m0, y0, gini0, gini_kind, money_kind) in _PROFILES.items():
        shock_pi = np.array([_SHOCK_YEARS.get(y, (0.0, 0.0))[0] for y in SYNTHETIC_YEARS])
        shock_g = np.array([_SHOCK_YEARS.get(y, (0.0, 0.0))[1] for y in SYNTHETIC_YEARS])
        g = g0 + shock_g + rng.normal(0.0, 1.2, n)
        pi = np.empty(n)
        level = pi0
        for t in range(n):
            level = pi0 + 0.55 * (level - pi0) + shock_pi[t] * (1 + pi0 / 10) + rng.normal(0.0, 0.8 + pi0 / 12)
            pi[t] = max(level, -1.5)
        u = np.clip(u0 - 0.25 * np.cumsum(g - g0) * 0.3 + rng.normal(0.0, 0.4, n), 1.0, 40.0)
        m3gdp = m0 * np.exp(np.cumsum(0.02 + rng.normal(0.0, 0.03, n)))
        gdppc = y0 * np.cumprod(1.0 + (g + pi * 0.3) / 100.0)
        money_growth = np.empty(n)
        money_growth[0] = g[0] + pi[0] + 2.0
        money_growth[1:] = 100.0 * (
            (m3gdp[1:] * gdppc[1:]) / (m3gdp[:-1] * gdppc[:-1]) - 1.0
        )
        money_level = 1e3 * m3gdp * gdppc / gdppc[0]
        mask = _gini_mask(gini_kind, rng, n)
        gini = None
        if gini0 is not None:
            gini = gini0 + 0.08 * (pi - pi0) + 0.15 * (u - u0) - 0.6 * np.log(gdppc / y0) + rng.normal(0.0, 0.5, n)

        for t, year in enumerate(SYNTHETIC_YEARS):
            obs: dict[str, float | None] = {
                INFLATION: pi[t],
                GDP_GROWTH: g[t],
                UNEMPLOYMENT: u[t],
                BROAD_MONEY_GDP: m3gdp[t],
                GDP_PER_CAPITA: gdppc[t],
            }
            if money_kind == "level":
                obs[BROAD_MONEY_LEVEL] = money_level[t]
            else:
                obs[BROAD_MONEY_GROWTH] = money_growth[t]
            if gini is not None and mask[t]:
                obs[GINI] = gini[t]
            if iso == "UKR" and year == 2014:
                obs[UNEMPLOYMENT] = None
            for code in sorted(obs):
                rows.append((iso, name, year, code, obs[code]))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for iso, name, year, code, value in rows:
        writer.writerow([iso, name, year, code, "" if value is None else f"{float(value):.4f}"])
    return buf.getvalue()


def _data_path(name: str) -> Path:
    return Path(str(resources.files("gindex") / "data" / name))


def synthetic_panel_path() -> Path:
    return _data_path(SYNTHETIC_FILE)


def load_synthetic_panel() -> Panel:
    """The bundled synthetic panel, with derived series added."""
    return load_panel(synthetic_panel_path())


def default_endpoints_path() -> Path:
    return _data_path(ENDPOINTS_FILE)


def load_default_endpoints() -> list[ScenarioEndpoints]:
    """Published 2026 and 2030 pillar and composite anchors for the nine economies."""
    return read_endpoints(default_endpoints_path())
