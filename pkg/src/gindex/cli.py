"""``gi`` command-line entry point.

Exit codes: 0 success, 1 input error, 2 config error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from gindex import __version__
from gindex.config import FORMATS, ConfigError, RunConfig, load_config
from gindex.datasets import default_endpoints_path
from gindex.panel import Panel, PanelError, load_panel
from gindex.pipeline import GIEstimator, GIResult
from gindex.report import (
    DISCLOSURES,
    InvariantViolation,
    bounds_table,
    check_result,
    components_table,
    contributions_table,
    forecast_metrics_table,
    gi_stats_table,
    gi_table,
    irs_fits_table,
    pillars_table,
    plot_series,
    regions_table,
    scenario_tables,
    sha256_file,
    snapshot_pillars_table,
    snapshot_table,
    write_json,
    write_table,
)
from gindex.scenario import MODES, build_scenario_paths, read_endpoints
from gindex.composite import GiWeights

logger = logging.getLogger("gindex")

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2, 3
COMMANDS = ("compute", "decompose", "scenario", "region", "report")


class InputError(Exception):
    """Unreadable or malformed input data."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gi", description="Composite macro-financial resilience index (GI).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "compute": "pillar, component and composite tables per country-year",
        "decompose": "year-on-year log-change attribution of GI to pillars",
        "scenario": "2026-2030 scenario paths with bands and binding pillars",
        "region": "regional field-wise means of the latest pillar values",
        "report": "run manifest with input digest, config echo and disclosures",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--input", type=Path, required=name != "scenario", help="long-format panel CSV")
        p.add_argument("--config", type=Path, help="TOML run configuration")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument("--format", choices=FORMATS, help="output format (default from config: csv)")
        p.add_argument("--cutoff", type=int, help="snapshot cutoff year (default 2024)")
        p.add_argument("--mode", choices=MODES, help="scenario composite mode")
        p.add_argument("--endpoints", type=Path, help="scenario endpoint CSV (overrides config)")
        p.add_argument("--raw-precision", action="store_true", default=None, help="full precision in summary CSVs")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    try:
        return cfg.with_overrides(
            format=args.format,
            cutoff=args.cutoff,
            mode=args.mode,
            raw_precision=args.raw_precision,
            endpoints=None if args.endpoints is None else str(args.endpoints),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _panel(args) -> Panel:
    if args.input is None:
        raise InputError("--input is required for this command")
    if not args.input.is_file():
        raise InputError(f"input file not found: {args.input}")
    try:
        return load_panel(args.input)
    except (PanelError, UnicodeDecodeError) as exc:
        raise InputError(f"{args.input}: {exc}") from None


def _run_pipeline(panel: Panel, cfg: RunConfig) -> GIResult:
    if cfg.cutoff < panel.years[0]:
        raise ConfigError(f"cutoff {cfg.cutoff} precedes the first panel year {panel.years[0]}")
    try:
        est = GIEstimator(**cfg.estimator_params())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = est.fit_transform(panel)
    check_result(result)
    return result


def cmd_compute(args, cfg: RunConfig) -> list[Path]:
    panel = _panel(args)
    result = _run_pipeline(panel, cfg)
    raw = cfg.raw_precision
    tables = [
        pillars_table(result, raw),
        gi_table(result, raw),
        components_table(result),
        snapshot_table(panel, cfg.cutoff),
        snapshot_pillars_table(result, cfg.cutoff, raw),
        bounds_table(result),
        irs_fits_table(result, panel, cfg.min_obs),
        forecast_metrics_table(result, raw),
        gi_stats_table(result, cfg.cutoff, raw),
        *plot_series(result, panel),
    ]
    return [p for t in tables for p in write_table(args.out, t, cfg.format)]


def cmd_decompose(args, cfg: RunConfig) -> list[Path]:
    result = _run_pipeline(_panel(args), cfg)
    return write_table(args.out, contributions_table(result), cfg.format)


def cmd_scenario(args, cfg: RunConfig) -> list[Path]:
    source = Path(cfg.endpoints) if cfg.endpoints else default_endpoints_path()
    try:
        endpoints = read_endpoints(source)
    except OSError as exc:
        raise InputError(f"cannot read endpoints {source}: {exc.strerror}") from None
    except (KeyError, ValueError) as exc:
        raise InputError(f"{source}: {exc}") from None
    run = build_scenario_paths(endpoints, cfg.scenarios, cfg.mode, GiWeights(*cfg.gi_weights), cfg.epsilon_floor)
    written = []
    for table in scenario_tables(run, cfg.raw_precision):
        written += write_table(args.out, table, cfg.format)
    summary = {
        "mode": cfg.mode,
        "endpoints": source.name,
        "endpoints_sha256": sha256_file(source),
        "scenarios": [
            {"name": s.name, "horizon": list(s.horizon), "pillar_shocks": list(s.pillar_shocks), "gi_shocks": list(s.gi_shocks)}
            for s in cfg.scenarios
        ],
        "countries": sorted({p.country for p in run.paths}),
        "skipped": [{"country": c, "reason": r} for c, r in run.skipped],
    }
    written.append(write_json(args.out / "run_summary.json", summary))
    return written


def cmd_region(args, cfg: RunConfig) -> list[Path]:
    result = _run_pipeline(_panel(args), cfg)
    return write_table(args.out, regions_table(result, cfg.regions, cfg.cutoff, cfg.raw_precision), cfg.format)


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.replace(microsecond=0).isoformat().replace("+00:00", "Z")


def cmd_report(args, cfg: RunConfig) -> list[Path]:
    _panel(args)  # validates the input before it is vouched for
    out: Path = args.out
    outputs = {}
    if out.is_dir():
        for path in sorted(p for p in out.rglob("*") if p.is_file() and p.name != "manifest.json"):
            outputs[path.relative_to(out).as_posix()] = sha256_file(path)
    manifest = {
        "engine": {"name": "gindex", "version": __version__},
        "input": {"file": args.input.name, "sha256": sha256_file(args.input)},
        "seed": cfg.seed,
        "config": cfg.flat(),
        "disclosures": list(DISCLOSURES),
        "outputs": outputs,
        "generated_at": _timestamp(),
    }
    return [write_json(out / "manifest.json", manifest)]


_HANDLERS = {
    "compute": cmd_compute,
    "decompose": cmd_decompose,
    "scenario": cmd_scenario,
    "region": cmd_region,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        args.out.mkdir(parents=True, exist_ok=True)
        written = _HANDLERS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"gi: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"gi: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"gi: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"gi: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logger.info("%s: wrote %d file(s) to %s", args.command, len(written), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
