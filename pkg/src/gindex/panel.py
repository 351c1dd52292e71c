"""Country-year indicator panel: CSV ingestion, derived series and vintage lookup.

The panel is long-format and keyed by WDI indicator code::

    country_iso3,country_name,year,indicator,value
    GEO,Georgia,2024,FP.CPI.TOTL.ZG,1.11

Blank value cells mark a country-year as known but unobserved. Missing
observations are never stored as numbers; lookups return ``None`` and
:class:`TimeSeries` carries NaN in the missing slots.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

logger = logging.getLogger(__name__)

INFLATION = "FP.CPI.TOTL.ZG"
GDP_GROWTH = "NY.GDP.MKTP.KD.ZG"
UNEMPLOYMENT = "SL.UEM.TOTL.ZS"
BROAD_MONEY_GDP = "FM.LBL.BMNY.GD.ZS"
GDP_PER_CAPITA = "NY.GDP.PCAP.CD"
GINI = "SI.POV.GINI"
BROAD_MONEY_LEVEL = "BROAD_MONEY_LEVEL"
BROAD_MONEY_GROWTH = "BROAD_MONEY_GROWTH"

# derived series, written by derive_indicators
M3_GROWTH = "DERIVED.M3_GROWTH"
LOG_GDP_PER_CAPITA = "DERIVED.LOG_GDPPC"

SOURCE_CODES = (
    INFLATION,
    GDP_GROWTH,
    UNEMPLOYMENT,
    BROAD_MONEY_GDP,
    GDP_PER_CAPITA,
    GINI,
    BROAD_MONEY_LEVEL,
    BROAD_MONEY_GROWTH,
)
DERIVED_CODES = (M3_GROWTH, LOG_GDP_PER_CAPITA)

HEADER = ("country_iso3", "country_name", "year", "indicator", "value")


class PanelError(Exception):
    """Base class for panel ingestion and lookup failures."""


class PanelParseError(PanelError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class PanelConflictError(PanelError, ValueError):
    pass


class PanelLookupError(PanelError, KeyError):
    def __str__(self) -> str:  # KeyError repr-quotes its message otherwise
        return str(self.args[0])


@dataclass(frozen=True)
class IndicatorRegistry:
    source: tuple[str, ...] = SOURCE_CODES
    derived: tuple[str, ...] = DERIVED_CODES

    def __contains__(self, code: str) -> bool:
        return code in self.source or code in self.derived

    @property
    def codes(self) -> tuple[str, ...]:
        return self.source + self.derived


DEFAULT_REGISTRY = IndicatorRegistry()


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Annual series with NaN marking missing slots."""

    years: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        years = np.array(self.years, dtype=int)
        values = np.array(self.values, dtype=float)
        if years.ndim != 1 or values.shape != years.shape:
            raise ValueError("years and values must be 1-D and of equal length")
        if years.size > 1 and np.any(np.diff(years) <= 0):
            raise ValueError("years must be strictly increasing")
        if np.any(np.isinf(values)):
            raise ValueError("series values must be finite or missing")
        years.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float | None], years: Iterable[int]) -> "TimeSeries":
        years = list(years)
        vals = [mapping.get(y) for y in years]
        return cls(years, [np.nan if v is None else v for v in vals])

    @classmethod
    def empty_like(cls, other: "TimeSeries") -> "TimeSeries":
        return cls(other.years, np.full(other.years.shape, np.nan))

    def __len__(self) -> int:
        return int(self.years.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.years, other.years) and np.array_equal(
            self.values, other.values, equal_nan=True
        )

    __hash__ = None

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.values)

    @property
    def is_contiguous(self) -> bool:
        return self.years.size < 2 or bool(np.all(np.diff(self.years) == 1))

    def get(self, year: int) -> float | None:
        idx = np.searchsorted(self.years, year)
        if idx < self.years.size and self.years[idx] == year and not np.isnan(self.values[idx]):
            return float(self.values[idx])
        return None

    def items(self) -> Iterator[tuple[int, float | None]]:
        for y, v in zip(self.years, self.values):
            yield int(y), (None if np.isnan(v) else float(v))

    def to_dict(self) -> dict[int, float]:
        return {y: v for y, v in self.items() if v is not None}

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(self.years, values)

    def lag(self, k: int = 1) -> "TimeSeries":
        """Value at year ``t`` is the original value at ``t - k`` (contiguous years assumed)."""
        out = np.full(self.values.shape, np.nan)
        if k < len(self):
            out[k:] = self.values[: len(self) - k]
        return self.with_values(out)

    def diff(self) -> "TimeSeries":
        """First difference; missing unless both consecutive years are observed."""
        return self.with_values(self.values - self.lag(1).values)


@dataclass(frozen=True, eq=False)
class Panel:
    """Immutable country-year store.

    ``observations`` maps ``(country, year, indicator)`` to a finite value.
    ``years`` is the inclusive ``(first, last)`` range; every year in it is
    addressable even when nothing was observed.
    """

    observations: Mapping[tuple[str, int, str], float]
    countries: tuple[str, ...]
    years: tuple[int, int]
    names: Mapping[str, str] = field(default_factory=dict)
    registry: IndicatorRegistry = DEFAULT_REGISTRY
    rejected_rows: tuple[int, ...] = ()

    def __post_init__(self):
        obs = dict(self.observations)
        for (country, year, code), value in obs.items():
            if not math.isfinite(value):
                raise ValueError(f"non-finite value stored for {(country, year, code)}")
            if code not in self.registry:
                raise ValueError(f"unregistered indicator {code!r}")
        object.__setattr__(self, "observations", MappingProxyType(obs))
        object.__setattr__(self, "names", MappingProxyType(dict(self.names)))
        object.__setattr__(self, "countries", tuple(sorted(self.countries)))
        first, last = self.years
        if first > last:
            raise ValueError("empty year range")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Panel):
            return NotImplemented
        return (
            dict(self.observations) == dict(other.observations)
            and self.countries == other.countries
            and self.years == other.years
            and dict(self.names) == dict(other.names)
        )

    __hash__ = None

    @property
    def year_range(self) -> range:
        return range(self.years[0], self.years[1] + 1)

    def indicators(self) -> set[str]:
        return {code for (_, _, code) in self.observations}

    def value(self, country: str, year: int, indicator: str) -> float | None:
        return self.observations.get((country, year, indicator))

    def series(self, country: str, indicator: str) -> TimeSeries:
        return get_series(self, country, indicator)

    def with_observations(self, extra: Mapping[tuple[str, int, str], float]) -> "Panel":
        merged = dict(self.observations)
        merged.update(extra)
        return Panel(merged, self.countries, self.years, self.names, self.registry, self.rejected_rows)

    def to_csv(self, stream: IO[str] | None = None) -> str:
        """Serialise to the ingestion format; ``parse_panel_csv`` inverts it exactly."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(HEADER)
        first_code = self.registry.codes[0]
        covered_countries = {c for (c, _, _) in self.observations}
        covered_years = {y for (_, y, _) in self.observations}
        for key in sorted(self.observations):
            country, year, code = key
            writer.writerow([country, self.names.get(country, ""), year, code, repr(self.observations[key])])
        for country in self.countries:
            if country not in covered_countries:
                writer.writerow([country, self.names.get(country, ""), self.years[0], first_code, ""])
        anchor = self.countries[0] if self.countries else ""
        for year in sorted({self.years[0], self.years[1]} - covered_years):
            writer.writerow([anchor, self.names.get(anchor, ""), year, first_code, ""])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def _decode(stream) -> str:
    if isinstance(stream, (str, Path)):
        return Path(stream).read_bytes().decode("utf-8-sig")
    data = stream.read()
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data.lstrip("﻿")


def parse_panel_csv(stream, registry: IndicatorRegistry = DEFAULT_REGISTRY) -> Panel:
    """Parse a long-format panel CSV.

    ``stream`` may be a path, a binary or a text file object. Rows whose
    indicator is not in ``registry`` are skipped and their line numbers kept
    in ``Panel.rejected_rows``.

    Raises
    ------
    PanelParseError
        Wrong header, wrong column count, or a non-numeric year/value.
    PanelConflictError
        The same ``(country, year, indicator)`` appears with different values.
    """
    text = _decode(stream)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise PanelParseError(1, "empty input") from None
    if tuple(h.strip() for h in header) != HEADER:
        raise PanelParseError(1, f"expected header {','.join(HEADER)}")

    observations: dict[tuple[str, int, str], float] = {}
    names: dict[str, str] = {}
    countries: set[str] = set()
    years: set[int] = set()
    rejected: list[int] = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(HEADER):
            raise PanelParseError(line, f"expected {len(HEADER)} columns, got {len(row)}")
        iso3, name, year_text, code, value_text = (cell.strip() for cell in row)
        if not iso3:
            raise PanelParseError(line, "empty country code")
        try:
            year = int(year_text)
        except ValueError:
            raise PanelParseError(line, f"non-integer year {year_text!r}") from None
        if code not in registry:
            logger.warning("line %d: unregistered indicator %r skipped", line, code)
            rejected.append(line)
            continue
        countries.add(iso3)
        years.add(year)
        if name:
            names.setdefault(iso3, name)
        if value_text == "":
            continue
        try:
            value = float(value_text)
        except ValueError:
            raise PanelParseError(line, f"non-numeric value {value_text!r}") from None
        if not math.isfinite(value):
            raise PanelParseError(line, f"non-finite value {value_text!r}")
        key = (iso3, year, code)
        if key in observations and observations[key] != value:
            raise PanelConflictError(
                f"line {line}: conflicting values for {key}: {observations[key]!r} vs {value!r}"
            )
        observations[key] = value

    if not years:
        raise PanelParseError(reader.line_num, "no data rows")
    return Panel(
        observations,
        tuple(countries),
        (min(years), max(years)),
        names,
        registry,
        tuple(rejected),
    )


def derive_indicators(panel: Panel) -> Panel:
    """Add broad-money growth and log GDP per capita where inputs exist.

    Broad-money growth passes through ``BROAD_MONEY_GROWTH`` when provided,
    otherwise it is the year-over-year percent change of ``BROAD_MONEY_LEVEL``.
    Existing observations are never overwritten, so the call is idempotent.
    Non-positive GDP per capita leaves the log missing and logs a warning.
    """
    extra: dict[tuple[str, int, str], float] = {}
    obs = panel.observations
    for country in panel.countries:
        for year in panel.year_range:
            key = (country, year, M3_GROWTH)
            if key not in obs:
                provided = obs.get((country, year, BROAD_MONEY_GROWTH))
                if provided is not None:
                    extra[key] = provided
                else:
                    prev = obs.get((country, year - 1, BROAD_MONEY_LEVEL))
                    curr = obs.get((country, year, BROAD_MONEY_LEVEL))
                    if prev is not None and curr is not None:
                        if prev > 0:
                            extra[key] = 100.0 * (curr - prev) / prev
                        else:
                            logger.warning("%s %d: non-positive broad money level, growth left missing", country, year)
            key = (country, year, LOG_GDP_PER_CAPITA)
            gdppc = obs.get((country, year, GDP_PER_CAPITA))
            if key not in obs and gdppc is not None:
                if gdppc > 0:
                    extra[key] = math.log(gdppc)
                else:
                    logger.warning("%s %d: GDP per capita %r is not positive, log left missing", country, year, gdppc)
    if not extra:
        return panel
    return panel.with_observations(extra)


def carry_forward_latest(panel: Panel, cutoff: int) -> dict[tuple[str, str], tuple[float, int]]:
    """Latest observation at or before ``cutoff`` for every (country, indicator).

    Pairs with nothing observed up to the cutoff are absent from the result.
    """
    if cutoff < panel.years[0]:
        raise ValueError(f"cutoff {cutoff} precedes the panel's first year {panel.years[0]}")
    latest: dict[tuple[str, str], tuple[float, int]] = {}
    for (country, year, code), value in panel.observations.items():
        if year > cutoff:
            continue
        key = (country, code)
        if key not in latest or latest[key][1] < year:
            latest[key] = (value, year)
    return dict(sorted(latest.items()))


def get_series(panel: Panel, country: str, indicator: str) -> TimeSeries:
    if country not in panel.countries:
        raise PanelLookupError(f"unknown country {country!r}")
    if indicator not in panel.registry:
        raise PanelLookupError(f"unknown indicator {indicator!r}")
    years = panel.year_range
    obs = panel.observations
    return TimeSeries(years, [obs.get((country, y, indicator), np.nan) for y in years])


def load_panel(path, registry: IndicatorRegistry = DEFAULT_REGISTRY) -> Panel:
    """Parse ``path`` and add the derived series."""
    return derive_indicators(parse_panel_csv(path, registry))
