import csv
from pathlib import Path

import numpy as np
import pytest

from gindex.datasets import load_synthetic_panel, synthetic_panel_path
from gindex.panel import (
    BROAD_MONEY_GDP,
    BROAD_MONEY_GROWTH,
    GDP_GROWTH,
    GDP_PER_CAPITA,
    GINI,
    INFLATION,
    UNEMPLOYMENT,
    derive_indicators,
    parse_panel_csv,
)

DATA = Path(__file__).parent / "data"


def _read_tsv(name):
    with open(DATA / name, encoding="utf-8") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


@pytest.fixture(scope="session")
def published_pillars():
    """Published scenario pillar rows: country, scenario, year, gi, band, irs, lnsr, ifc, binding."""
    rows = _read_tsv("published_scenario_pillars.tsv")
    for r in rows:
        r["year"] = int(r["year"])
        for k in ("gi", "irs", "lnsr", "ifc", "binding_score"):
            r[k] = float(r[k])
    return rows


@pytest.fixture(scope="session")
def published_gi():
    """Published scenario composite rows keyed by (country, scenario, year)."""
    return {(r["country"], r["scenario"], int(r["year"])): (float(r["gi"]), r["band"]) for r in _read_tsv("published_scenario_gi.tsv")}


@pytest.fixture(scope="session")
def synthetic_panel():
    return load_synthetic_panel()


@pytest.fixture(scope="session")
def synthetic_csv():
    return synthetic_panel_path()


def panel_from_columns(columns, country="AAA", first_year=2000, name="Testland"):
    """Build a panel from ``{indicator: sequence}`` with NaN/None as missing."""
    lines = ["country_iso3,country_name,year,indicator,value"]
    for code, values in columns.items():
        for k, v in enumerate(values):
            cell = "" if v is None or (isinstance(v, float) and np.isnan(v)) else repr(float(v))
            lines.append(f"{country},{name},{first_year + k},{code},{cell}")
    return derive_indicators(parse_panel_csv(__import__("io").StringIO("\n".join(lines) + "\n")))


@pytest.fixture
def make_panel():
    return panel_from_columns


@pytest.fixture
def macro_columns():
    """Twenty years of smooth synthetic macro data for one country."""
    rng = np.random.default_rng(7)
    n = 20
    t = np.arange(n)
    pi = 5 + 2 * np.sin(t / 2.0) + rng.normal(0, 0.5, n)
    g = 3 + np.cos(t / 3.0) + rng.normal(0, 0.3, n)
    u = 8 + 0.5 * np.sin(t / 4.0) + rng.normal(0, 0.2, n)
    return {
        INFLATION: pi,
        GDP_GROWTH: g,
        UNEMPLOYMENT: u,
        BROAD_MONEY_GDP: 30 + t + rng.normal(0, 0.5, n),
        BROAD_MONEY_GROWTH: 10 + rng.normal(0, 1, n),
        GDP_PER_CAPITA: 3000 * np.exp(0.03 * t),
        GINI: 35 + 0.2 * pi - 0.3 * u + rng.normal(0, 0.3, n),
    }


# -- acceptance reporting ------------------------------------------------------


def pytest_configure(config):
    config.acceptance_results = {}


@pytest.fixture
def acceptance(request):
    """Record one verdict per acceptance criterion; returns ``record(number, ok, detail)``."""
    results = request.config.acceptance_results

    def record(number, ok, detail):
        results[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
