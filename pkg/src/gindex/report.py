"""Table builders and deterministic CSV/JSON writers for CLI outputs.

A table is a ``Table(name, columns, rows, decimals)``; ``decimals=None`` keeps
full float precision (shortest round-trip repr). Missing numbers are written
as empty CSV cells and JSON ``null``; NaN or infinity is never emitted.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from gindex import ifc as ifc_mod
from gindex import irs as irs_mod
from gindex import lnsr as lnsr_mod
from gindex.composite import PILLARS, GiRecord, descriptive_stats, regional_mean
from gindex.panel import GINI, Panel, carry_forward_latest, get_series
from gindex.pipeline import GIResult
from gindex.scaling import score
from gindex.scenario import ScenarioRun, binding_pillar

SUMMARY_DECIMALS = 2
IDENTITY_TOLERANCE = 1e-12


class InvariantViolation(RuntimeError):
    """An output failed an internal consistency check."""


@dataclass
class Table:
    name: str
    columns: Sequence[str]
    rows: list[list[Any]] = field(default_factory=list)
    decimals: int | None = None


# -- cell formatting ----------------------------------------------------------


def _finite_or_none(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_cell(value, decimals: int | None = None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return ""
        if decimals is None:
            return repr(value)
        text = f"{value:.{decimals}f}"
        return text[1:] if text.startswith("-") and float(text) == 0 else text
    return str(value)


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v, table.decimals) for v in row])
    return buf.getvalue()


def table_to_json(table: Table) -> str:
    records = [
        {c: _finite_or_none(float(v) if isinstance(v, float) else v) for c, v in zip(table.columns, row)}
        for row in table.rows
    ]
    return json.dumps(records, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_table(out_dir: Path, table: Table, fmt: str = "csv") -> list[Path]:
    written = []
    target = Path(out_dir) / table.name
    target.parent.mkdir(parents=True, exist_ok=True)
    if fmt in ("csv", "both"):
        path = target.with_suffix(".csv")
        path.write_text(table_to_csv(table), encoding="utf-8", newline="")
        written.append(path)
    if fmt in ("json", "both"):
        path = target.with_suffix(".json")
        path.write_text(table_to_json(table), encoding="utf-8")
        written.append(path)
    return written


def write_json(path: Path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n", encoding="utf-8")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# -- invariant checks ---------------------------------------------------------


def check_result(result: GIResult) -> None:
    """Raise :class:`InvariantViolation` if any pillar or composite is inconsistent."""
    for rec in result.records:
        g = rec.gi
        present = [p for p in g.pillars if p is not None]
        for p in present:
            if not 0.0 <= p <= 100.0:
                raise InvariantViolation(f"{g.country} {g.year}: pillar {p} outside [0, 100]")
        if (g.gi is None) != (not present):
            raise InvariantViolation(f"{g.country} {g.year}: composite presence disagrees with pillars")
        if g.gi is not None and not min(present) - 1e-9 <= g.gi <= max(present) + 1e-9:
            raise InvariantViolation(f"{g.country} {g.year}: GI {g.gi} outside pillar range")


def dlog_gi(prev: GiRecord, curr: GiRecord) -> float | None:
    if prev.gi is None or curr.gi is None or prev.gi <= 0 or curr.gi <= 0:
        return None
    return math.log(curr.gi) - math.log(prev.gi)


# -- compute outputs ----------------------------------------------------------


def _d(raw_precision: bool) -> int | None:
    return None if raw_precision else SUMMARY_DECIMALS


def pillars_table(result: GIResult, raw_precision: bool = False) -> Table:
    t = Table("pillars", ("country", "year", "irs", "lnsr", "ifc", "gi", "pillars_present", "binding_pillar"), decimals=_d(raw_precision))
    for rec in result.records:
        g = rec.gi
        binding = binding_pillar(*g.pillars)
        t.rows.append([g.country, g.year, *g.pillars, g.gi, g.mask_label, None if binding is None else binding[0]])
    return t


def gi_table(result: GIResult, raw_precision: bool = False) -> Table:
    t = Table("gi", ("country", "year", "gi", "reason"), decimals=_d(raw_precision))
    for rec in result.records:
        t.rows.append([rec.country, rec.year, rec.gi.gi, rec.gi.reason if rec.gi.gi is None else ""])
    return t


_MISSING_REASON = {
    "irs.r_squared": "inequality_model_unavailable",
    "irs.inv_abs_dgini": "gini_change_unobserved",
    "irs.smoothing": "incomplete_gini_window",
    "lnsr.inv_var_v": "incomplete_window",
    "lnsr.inv_rms_eps": "incomplete_window",
    "lnsr.align": "incomplete_window",
    "ifc.gain_fpas": "no_rolling_rmse",
    "ifc.gain_ar": "no_rolling_rmse",
    "ifc.hmm_accuracy": "incomplete_window",
    "ifc.zeta_match": "incomplete_window",
}


def _status(metric: str, raw, bounds) -> str:
    if raw is None:
        return _MISSING_REASON[metric]
    if bounds is None:
        return "no_scaling_bounds"
    if bounds.degenerate:
        return "degenerate_bounds"
    return "ok"


def _diagnostics(rec) -> list[tuple[str, str, float | None]]:
    i, l, f = rec.irs, rec.lnsr, rec.ifc
    return [
        ("IRS", "irs.abs_dgini", i.abs_dgini),
        ("LNSR", "lnsr.v", l.v),
        ("LNSR", "lnsr.dv", l.dv),
        ("LNSR", "lnsr.var_v", l.var_v),
        ("LNSR", "lnsr.eps", l.eps),
        ("LNSR", "lnsr.rms_eps", l.rms_eps),
        ("IFC", "ifc.rmse_ar", f.rmse_ar),
        ("IFC", "ifc.rmse_fpas", f.rmse_fpas),
        ("IFC", "ifc.rmse_fpas_zeta", f.rmse_fz),
        ("IFC", "ifc.delta_rmse_fpas", f.d_fpas),
        ("IFC", "ifc.delta_rmse_ar", f.d_ar),
    ]


def components_table(result: GIResult) -> Table:
    """Long table: every raw metric, its score, weight and a status/reason code."""
    t = Table("components", ("country", "year", "pillar", "component", "raw", "score", "weight", "status"))
    weights = {"IRS": result.weights.get("irs"), "LNSR": result.weights.get("lnsr"), "IFC": result.weights.get("ifc")}
    for rec in result.records:
        blocks = (
            ("IRS", irs_mod.METRICS, rec.irs.raw_metrics, rec.irs.scores, rec.irs.irs),
            ("LNSR", lnsr_mod.METRICS, rec.lnsr.raw_metrics, rec.lnsr.scores, rec.lnsr.lnsr),
            ("IFC", ifc_mod.METRICS, rec.ifc.raw_metrics, rec.ifc.scores, rec.ifc.ifc),
        )
        for pillar, metrics, raws, scores, value in blocks:
            for k, (m, raw, s) in enumerate(zip(metrics, raws, scores)):
                w = weights[pillar][k] if weights[pillar] else None
                t.rows.append([rec.country, rec.year, pillar, m, raw, s, w, _status(m, raw, result.bounds.get(m))])
            t.rows.append([rec.country, rec.year, pillar, pillar.lower(), None, value, None, "ok" if value is not None else "all_components_missing"])
        if rec.lnsr.align_degenerate:
            t.rows.append([rec.country, rec.year, "LNSR", "lnsr.align_flat_window", None, None, None, "flat_input_corr_set_0"])
        for pillar, name, raw in _diagnostics(rec):
            t.rows.append([rec.country, rec.year, pillar, name, raw, None, None, "diagnostic" if raw is not None else "unobserved"])
        g = rec.gi
        t.rows.append([rec.country, rec.year, "GI", "gi", None, g.gi, None, "ok" if g.gi is not None else "no_pillars"])
    return t


def snapshot_table(panel: Panel, cutoff: int) -> Table:
    t = Table("snapshot", ("country", "indicator", "value", "source_year", "cutoff"))
    for (country, code), (value, year) in carry_forward_latest(panel, cutoff).items():
        t.rows.append([country, code, value, year, cutoff])
    return t


def latest_pillars(result: GIResult, cutoff: int) -> dict[str, dict[str, tuple[float, int] | None]]:
    """Per country, the latest present value (and its year) of each field at or before ``cutoff``."""
    out: dict[str, dict[str, tuple[float, int] | None]] = {}
    for country in result.countries:
        fields: dict[str, tuple[float, int] | None] = {"gi": None, "irs": None, "lnsr": None, "ifc": None}
        for rec in result.for_country(country):
            if rec.year > cutoff:
                continue
            for name, value in zip(("irs", "lnsr", "ifc", "gi"), (*rec.gi.pillars, rec.gi.gi)):
                if value is not None:
                    fields[name] = (value, rec.year)
        out[country] = fields
    return out


def snapshot_pillars_table(result: GIResult, cutoff: int, raw_precision: bool = False) -> Table:
    cols = ("country", "gi", "gi_year", "irs", "irs_year", "lnsr", "lnsr_year", "ifc", "ifc_year", "cutoff")
    t = Table("snapshot_pillars", cols, decimals=_d(raw_precision))
    for country, fields in latest_pillars(result, cutoff).items():
        row: list[Any] = [country]
        for name in ("gi", "irs", "lnsr", "ifc"):
            row.extend(fields[name] if fields[name] else (None, None))
        t.rows.append(row + [cutoff])
    return t


def bounds_table(result: GIResult) -> Table:
    t = Table("bounds", ("metric", "q_low", "q_high", "lower", "upper", "pool_size", "degenerate"))
    for m in sorted(result.bounds):
        b = result.bounds[m]
        t.rows.append([m, b.q_low, b.q_high, b.p5, b.p95, b.pool_size, b.degenerate])
    return t


def irs_fits_table(result: GIResult, panel: Panel, min_obs: int) -> Table:
    names = ("const", "inflation", "unemployment", "log_gdppc")
    cols = ["country", "n_obs", "r_squared"] + [f"beta_{n}" for n in names] + [f"p_{n}" for n in names] + ["status"]
    t = Table("irs_fits", cols)
    for country in result.countries:
        row = irs_mod.inequality_fit_table(country, panel, min_obs)
        if row is None:
            n_gini = int(get_series(panel, country, GINI).present.sum())
            t.rows.append([country, n_gini] + [None] * (len(cols) - 3) + ["insufficient_observations"])
        else:
            t.rows.append([row.get(c) for c in cols[:-1]] + ["ok"])
    return t


def forecast_metrics_table(result: GIResult, raw_precision: bool = False) -> Table:
    cols = (
        "country", "year", "rmse_ar", "rmse_fpas", "rmse_fpas_zeta", "delta_rmse_fpas_pct", "delta_rmse_ar_pct",
        "hmm_accuracy", "zeta_match", "alpha", "validation_start", "validation_end", "fallback_years",
    )
    t = Table("forecast_metrics", cols, decimals=None if raw_precision else 3)
    for country in result.countries:
        fs = result.forecasts[country]
        rows = [r.ifc for r in result.for_country(country) if r.ifc.rmse_fz is not None]
        last = rows[-1] if rows else None
        v0, v1 = fs.validation if fs.validation else (None, None)
        vals = (None,) * 7 if last is None else (last.rmse_ar, last.rmse_fpas, last.rmse_fz, last.d_fpas, last.d_ar, last.hmm_acc, last.zeta_match)
        t.rows.append([country, None if last is None else last.year, *vals, fs.alpha, v0, v1, len(fs.fpas.fallback_years)])
    return t


def gi_stats_table(result: GIResult, cutoff: int, raw_precision: bool = False) -> Table:
    t = Table("gi_stats", ("country", "n", "mean", "std", "min", "max", "last"), decimals=_d(raw_precision))
    for country in result.countries:
        stats = descriptive_stats([r.gi.gi for r in result.for_country(country) if r.year <= cutoff])
        if stats is None:
            t.rows.append([country, 0, None, None, None, None, None])
        else:
            t.rows.append([country, stats.n, stats.mean, stats.std, stats.min, stats.max, stats.last])
    return t


def plot_series(result: GIResult, panel: Panel) -> list[Table]:
    """Chart-ready data files, one per chart kind (per country where relevant)."""
    tables: list[Table] = []
    countries = result.countries
    years = sorted({r.year for r in result.records})
    by_key = {(r.country, r.year): r for r in result.records}
    traj = Table("series/gi_trajectories", ("year", *countries))
    for y in years:
        traj.rows.append([y] + [by_key[(c, y)].gi.gi if (c, y) in by_key else None for c in countries])
    tables.append(traj)

    maps = Table("series/scaling_maps", ("metric", "raw", "score"))
    for m in sorted(result.bounds):
        b = result.bounds[m]
        raws = sorted({raw for rec in result.records for mm, raw in _all_raw(rec) if mm == m and raw is not None})
        maps.rows.extend([m, x, score(x, b)] for x in raws)
    tables.append(maps)

    for c in countries:
        recs = result.for_country(c)
        gini = get_series(panel, c, GINI)
        t = Table(f"series/{c}_gi_and_pillars", ("year", "gi", "irs", "lnsr", "ifc"))
        t.rows = [[r.year, r.gi.gi, *r.gi.pillars] for r in recs]
        tables.append(t)
        t = Table(f"series/{c}_dlog_contributions", ("year", "dlog_gi", "c_irs", "c_lnsr", "c_ifc"))
        for prev, r in zip([None] + recs[:-1], recs):
            contrib = r.gi.contributions
            d = None if prev is None or contrib is None else dlog_gi(prev.gi, r.gi)
            t.rows.append([r.year, d, *(contrib if contrib else (None, None, None))])
        tables.append(t)
        t = Table(f"series/{c}_irs_diagnostics", ("year", "gini", "abs_dgini", "smoothing", "irs"))
        t.rows = [[r.year, gini.get(r.year), r.irs.abs_dgini, r.irs.smoothing, r.irs.irs] for r in recs]
        tables.append(t)
        t = Table(f"series/{c}_liquidity_speed", ("year", "v", "var_v"))
        t.rows = [[r.year, r.lnsr.v, r.lnsr.var_v] for r in recs]
        tables.append(t)
        t = Table(f"series/{c}_residual_force", ("year", "eps", "rms_eps"))
        t.rows = [[r.year, r.lnsr.eps, r.lnsr.rms_eps] for r in recs]
        tables.append(t)
        t = Table(f"series/{c}_cycle_alignment", ("year", "align"))
        t.rows = [[r.year, r.lnsr.align] for r in recs]
        tables.append(t)
        fs = result.forecasts[c]
        t = Table(f"series/{c}_inflation_forecasts", ("year", "actual", "ar1", "fpas_arx", "fpas_zeta"))
        t.rows = [[int(y), fs.actual.get(int(y)), fs.ar1.get(int(y)), fs.fpas.get(int(y)), fs.fpas_zeta.get(int(y))] for y in fs.years]
        tables.append(t)
    return tables


def _all_raw(rec) -> Iterable[tuple[str, float | None]]:
    yield from zip(irs_mod.METRICS, rec.irs.raw_metrics)
    yield from zip(lnsr_mod.METRICS, rec.lnsr.raw_metrics)
    yield from zip(ifc_mod.METRICS, rec.ifc.raw_metrics)


# -- decompose ----------------------------------------------------------------


def contributions_table(result: GIResult) -> Table:
    cols = ("country", "year", "gi", "dlog_gi", "c_irs", "c_lnsr", "c_ifc", "residual", "reason")
    t = Table("contributions", cols)
    for country in result.countries:
        recs = result.for_country(country)
        for prev, r in zip([None] + recs[:-1], recs):
            g = r.gi
            if g.contributions is None:
                t.rows.append([country, r.year, g.gi, None, None, None, None, None, g.reason or "undefined"])
                continue
            d = dlog_gi(prev.gi, g)
            residual = g.contributions.total - d
            if abs(residual) > IDENTITY_TOLERANCE:
                raise InvariantViolation(f"{country} {r.year}: decomposition residual {residual:.3e}")
            t.rows.append([country, r.year, g.gi, d, *g.contributions, residual, ""])
    return t


# -- scenario -----------------------------------------------------------------


def scenario_tables(run: ScenarioRun, raw_precision: bool = False) -> tuple[Table, Table]:
    d = _d(raw_precision)
    gi = Table("scenario_gi", ("country", "scenario", "mode", "year", "gi", "band"), decimals=d)
    pil = Table(
        "scenario_pillars",
        ("country", "scenario", "mode", "year", "gi", "band", "irs", "lnsr", "ifc", "binding_pillar", "binding_score"),
        decimals=d,
    )
    for path in run.paths:
        for row in path.rows:
            if row.binding_score != min(row.irs, row.lnsr, row.ifc):
                raise InvariantViolation(f"{path.country} {row.year}: binding score is not the pillar minimum")
            for v in (row.gi, row.irs, row.lnsr, row.ifc):
                if v is not None and not 0.0 <= v <= 100.0:
                    raise InvariantViolation(f"{path.country} {row.year}: scenario value {v} outside [0, 100]")
            gi.rows.append([path.country, path.scenario, path.mode, row.year, row.gi, row.band])
            pil.rows.append(
                [path.country, path.scenario, path.mode, row.year, row.gi, row.band, row.irs, row.lnsr, row.ifc, row.binding_pillar, row.binding_score]
            )
    return gi, pil


# -- regions ------------------------------------------------------------------


def regions_table(result: GIResult, regions, cutoff: int, raw_precision: bool = False) -> Table:
    cols = ("region", "gi", "irs", "lnsr", "ifc", "n_members", "n_gi", "n_irs", "n_lnsr", "n_ifc", "members", "note")
    t = Table("regions", cols, decimals=_d(raw_precision))
    latest = latest_pillars(result, cutoff)
    for region in sorted(regions):
        members = [c for c in regions[region] if c in latest]
        rows = [{k: (v[0] if v else None) for k, v in latest[c].items()} for c in members]
        reg = regional_mean(rows, region)
        note = "" if members else "no_members_in_panel"
        t.rows.append(
            [region, *(reg[f] for f in ("gi", "irs", "lnsr", "ifc")), reg.n_members,
             *(reg.counts[f] for f in ("gi", "irs", "lnsr", "ifc")), " ".join(members), note]
        )
    return t


DISCLOSURES = (
    {
        "id": "composite_levels",
        "text": (
            "GI is the weighted geometric mean of the three pillars. Published composite levels cannot be "
            "recovered from the published pillar values with that formula (for example pillars 69.02, 74.40, "
            "16.08 give 45.77, while 54.73 is reported), so published GI levels are not reproduced."
        ),
    },
    {
        "id": "band_definitions",
        "text": (
            "Scenario bands use quarters of the scale: [0,25), [25,50), [50,75), [75,100]. A second published "
            "reading guide uses 0-40/40-60/60-80/80-100; that scheme is not applied."
        ),
    },
    {
        "id": "scenario_gi_modes",
        "text": (
            "table_replication shocks the composite path directly with its own schedule; recompute_gi "
            "re-aggregates the shocked pillars. Published composite offsets differ from pillar offsets, so "
            "the two modes give different composite paths."
        ),
    },
    {
        "id": "method_choices",
        "text": (
            "IRS smoothing is 1/(1 + RMS of second differences of Gini) over the rolling window. The zeta "
            "signal uses |zeta(1/2 + i t)| centred by a trailing mean. Scenario endpoints are inputs."
        ),
    },
)
