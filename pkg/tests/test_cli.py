import csv
import json
import re

import pytest

from gindex.cli import main


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def compute_dir(tmp_path_factory, synthetic_csv):
    out = tmp_path_factory.mktemp("compute")
    assert main(["compute", "--input", str(synthetic_csv), "--out", str(out)]) == 0
    return out


class TestCompute:
    def test_files(self, compute_dir):
        for name in ("pillars", "gi", "components", "snapshot", "snapshot_pillars", "bounds", "irs_fits", "forecast_metrics", "gi_stats"):
            assert (compute_dir / f"{name}.csv").is_file()
        assert (compute_dir / "series" / "GEO_inflation_forecasts.csv").is_file()
        assert (compute_dir / "series" / "gi_trajectories.csv").is_file()

    def test_row_order(self, compute_dir):
        rows = read_csv(compute_dir / "pillars.csv")
        keys = [(r["country"], int(r["year"])) for r in rows]
        assert keys == sorted(keys)

    def test_no_nan_text(self, compute_dir):
        pattern = re.compile(r"(^|,)(nan|NaN|inf|-inf|Infinity)(,|$)", re.M)
        for path in compute_dir.rglob("*.csv"):
            assert not pattern.search(path.read_text()), path

    def test_two_decimals(self, compute_dir):
        row = next(r for r in read_csv(compute_dir / "pillars.csv") if r["gi"])
        assert re.fullmatch(r"-?\d+\.\d\d", row["gi"])

    def test_missing_gini_country(self, compute_dir):
        aze = [r for r in read_csv(compute_dir / "pillars.csv") if r["country"] == "AZE"]
        assert all(r["irs"] == "" for r in aze)
        assert any(r["gi"] for r in aze)

    def test_every_blank_has_reason(self, compute_dir):
        comps = {(r["country"], r["year"], r["component"]): r["status"] for r in read_csv(compute_dir / "components.csv")}
        for r in read_csv(compute_dir / "pillars.csv"):
            for field in ("irs", "lnsr", "ifc", "gi"):
                if r[field] == "":
                    assert comps[(r["country"], r["year"], field)] not in ("", "ok")
        for (c, y, name), status in comps.items():
            assert status

    def test_snapshot_source_year(self, compute_dir):
        rows = read_csv(compute_dir / "snapshot.csv")
        assert rows and all(int(r["source_year"]) <= 2024 for r in rows)
        chn_gini = next(r for r in rows if r["country"] == "CHN" and r["indicator"] == "SI.POV.GINI")
        assert int(chn_gini["source_year"]) < 2024

    def test_raw_precision_and_json(self, tmp_path, synthetic_csv):
        assert main(["compute", "--input", str(synthetic_csv), "--out", str(tmp_path), "--format", "both", "--raw-precision"]) == 0
        data = json.loads((tmp_path / "pillars.json").read_text())
        assert {"country", "year", "gi"} <= set(data[0])
        row = next(r for r in read_csv(tmp_path / "pillars.csv") if r["gi"])
        assert len(row["gi"].split(".")[1]) > 2


class TestOtherCommands:
    def test_decompose(self, tmp_path, synthetic_csv):
        assert main(["decompose", "--input", str(synthetic_csv), "--out", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "contributions.csv")
        defined = [r for r in rows if r["residual"]]
        assert defined and all(abs(float(r["residual"])) <= 1e-12 for r in defined)
        assert all(r["reason"] for r in rows if not r["residual"])

    @pytest.mark.parametrize("mode", ["recompute_gi", "table_replication"])
    def test_scenario(self, tmp_path, mode):
        assert main(["scenario", "--out", str(tmp_path), "--mode", mode]) == 0
        rows = read_csv(tmp_path / "scenario_gi.csv")
        assert len(rows) == 9 * 3 * 5 and {r["mode"] for r in rows} == {mode}
        pillars = read_csv(tmp_path / "scenario_pillars.csv")
        arm = next(r for r in pillars if r["country"] == "ARM" and r["scenario"] == "Baseline" and r["year"] == "2026")
        assert (arm["binding_pillar"], arm["binding_score"]) == ("IRS", "8.50")
        summary = json.loads((tmp_path / "run_summary.json").read_text())
        assert summary["skipped"] == []

    def test_scenario_skips_missing(self, tmp_path):
        ep = tmp_path / "ep.csv"
        ep.write_text("country,pillar,value_start,value_end\nAAA,IRS,1,2\nAAA,LNSR,1,2\nBBB,IRS,1,2\nBBB,LNSR,1,2\nBBB,IFC,1,2\n")
        assert main(["scenario", "--out", str(tmp_path), "--endpoints", str(ep)]) == 0
        summary = json.loads((tmp_path / "run_summary.json").read_text())
        assert summary["skipped"] == [{"country": "AAA", "reason": "missing_endpoints:IFC"}]

    def test_region(self, tmp_path, synthetic_csv):
        cfg = tmp_path / "r.toml"
        cfg.write_text('[regions.EAS]\nmembers = ["CHN"]\n[regions.NONE]\nmembers = ["ZZZ"]\n[regions.PAIR]\nmembers = ["GEO", "USA"]\n')
        assert main(["region", "--input", str(synthetic_csv), "--config", str(cfg), "--out", str(tmp_path), "--raw-precision"]) == 0
        rows = {r["region"]: r for r in read_csv(tmp_path / "regions.csv")}
        snap = {r["country"]: r for r in read_csv_snapshot(tmp_path, synthetic_csv)}
        assert rows["EAS"]["gi"] == snap["CHN"]["gi"]
        assert rows["NONE"]["gi"] == "" and rows["NONE"]["note"] == "no_members_in_panel"
        assert float(rows["PAIR"]["gi"]) == pytest.approx((float(snap["GEO"]["gi"]) + float(snap["USA"]["gi"])) / 2)

    def test_report(self, tmp_path, synthetic_csv, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        args = ["report", "--input", str(synthetic_csv), "--out", str(tmp_path)]
        assert main(args) == 0
        first = (tmp_path / "manifest.json").read_text()
        assert main(args) == 0
        assert (tmp_path / "manifest.json").read_text() == first
        manifest = json.loads(first)
        assert manifest["generated_at"] == "1970-01-01T00:00:00Z"
        assert {d["id"] for d in manifest["disclosures"]} >= {"composite_levels", "band_definitions"}
        assert len(manifest["input"]["sha256"]) == 64

    def test_report_digest_tracks_input(self, tmp_path, synthetic_csv):
        copy = tmp_path / "in.csv"
        copy.write_bytes(synthetic_csv.read_bytes())
        main(["report", "--input", str(copy), "--out", str(tmp_path / "a")])
        copy.write_bytes(synthetic_csv.read_bytes() + b"\n")
        main(["report", "--input", str(copy), "--out", str(tmp_path / "b")])
        a = json.loads((tmp_path / "a" / "manifest.json").read_text())["input"]["sha256"]
        b = json.loads((tmp_path / "b" / "manifest.json").read_text())["input"]["sha256"]
        assert a != b

    def test_report_config_diff(self, tmp_path, synthetic_csv):
        cfg = tmp_path / "w.toml"
        cfg.write_text("[weights]\ngi = [0.4, 0.3, 0.3]\n")
        main(["report", "--input", str(synthetic_csv), "--out", str(tmp_path / "a")])
        main(["report", "--input", str(synthetic_csv), "--config", str(cfg), "--out", str(tmp_path / "b")])
        a = json.loads((tmp_path / "a" / "manifest.json").read_text())["config"]
        b = json.loads((tmp_path / "b" / "manifest.json").read_text())["config"]
        assert [k for k in a if a[k] != b[k]] == ["gi_weights"]


def read_csv_snapshot(tmp_path, synthetic_csv):
    out = tmp_path / "snap"
    main(["compute", "--input", str(synthetic_csv), "--out", str(out), "--raw-precision"])
    return read_csv(out / "snapshot_pillars.csv")


class TestExitCodes:
    def test_missing_input(self, tmp_path):
        assert main(["compute", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 1

    def test_malformed_input(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("country_iso3,country_name,year,indicator,value\nGEO,Georgia,2024,FP.CPI.TOTL.ZG,abc\n")
        assert main(["compute", "--input", str(bad), "--out", str(tmp_path)]) == 1

    def test_bad_config(self, tmp_path, synthetic_csv):
        cfg = tmp_path / "c.toml"
        cfg.write_text("[run]\nunknown_key = 1\n")
        assert main(["compute", "--input", str(synthetic_csv), "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_cutoff_before_panel(self, tmp_path, synthetic_csv):
        assert main(["compute", "--input", str(synthetic_csv), "--cutoff", "1990", "--out", str(tmp_path)]) == 2

    def test_invariant(self, tmp_path, synthetic_csv, monkeypatch):
        from gindex import cli
        from gindex.report import InvariantViolation

        def broken(result):
            raise InvariantViolation("planted")

        monkeypatch.setattr(cli, "check_result", broken)
        assert main(["compute", "--input", str(synthetic_csv), "--out", str(tmp_path)]) == 3
