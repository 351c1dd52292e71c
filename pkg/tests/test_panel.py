import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gindex.panel import (
    BROAD_MONEY_GROWTH,
    BROAD_MONEY_LEVEL,
    GDP_PER_CAPITA,
    GINI,
    INFLATION,
    LOG_GDP_PER_CAPITA,
    M3_GROWTH,
    PanelConflictError,
    PanelLookupError,
    PanelParseError,
    TimeSeries,
    carry_forward_latest,
    derive_indicators,
    get_series,
    parse_panel_csv,
)

HEADER = "country_iso3,country_name,year,indicator,value\n"


def parse(body):
    return parse_panel_csv(io.StringIO(HEADER + body))


class TestParse:
    def test_three_rows(self):
        p = parse(
            "GEO,Georgia,2024,FP.CPI.TOTL.ZG,1.1\n"
            "GEO,Georgia,2024,NY.GDP.MKTP.KD.ZG,9.4\n"
            "GEO,Georgia,2024,SL.UEM.TOTL.ZS,13.9\n"
        )
        assert len(p.observations) == 3
        assert p.countries == ("GEO",)
        assert p.years == (2024, 2024)
        assert p.names["GEO"] == "Georgia"

    def test_non_numeric_value_names_line(self):
        with pytest.raises(PanelParseError, match="line 3"):
            parse("GEO,Georgia,2023,FP.CPI.TOTL.ZG,2.0\nGEO,Georgia,2024,FP.CPI.TOTL.ZG,abc\n")

    def test_conflict(self):
        with pytest.raises(PanelConflictError):
            parse("GEO,Georgia,2024,FP.CPI.TOTL.ZG,1.11\nGEO,Georgia,2024,FP.CPI.TOTL.ZG,1.12\n")

    def test_identical_duplicates_collapse(self):
        p = parse("GEO,Georgia,2024,FP.CPI.TOTL.ZG,1.11\nGEO,Georgia,2024,FP.CPI.TOTL.ZG,1.11\n")
        assert len(p.observations) == 1

    def test_wrong_column_count(self):
        with pytest.raises(PanelParseError, match="columns"):
            parse("GEO,Georgia,2024,FP.CPI.TOTL.ZG\n")

    def test_bad_header(self):
        with pytest.raises(PanelParseError, match="line 1"):
            parse_panel_csv(io.StringIO("a,b,c,d,e\n"))

    def test_blank_value_is_missing_and_unregistered_rejected(self):
        p = parse("GEO,Georgia,2020,FP.CPI.TOTL.ZG,\nGEO,Georgia,2021,XX.UNKNOWN,3\nGEO,Georgia,2022,FP.CPI.TOTL.ZG,4\n")
        assert p.value("GEO", 2020, INFLATION) is None
        assert p.rejected_rows == (3,)
        assert p.years == (2020, 2022)

    def test_non_finite_rejected(self):
        with pytest.raises(PanelParseError):
            parse("GEO,Georgia,2024,FP.CPI.TOTL.ZG,nan\n")

    def test_bytes_with_bom(self):
        p = parse_panel_csv(io.BytesIO(("﻿" + HEADER + "GEO,Georgia,2024,FP.CPI.TOTL.ZG,1.5\n").encode()))
        assert p.value("GEO", 2024, INFLATION) == 1.5

    def test_immutable(self):
        p = parse("GEO,Georgia,2024,FP.CPI.TOTL.ZG,1.5\n")
        with pytest.raises(TypeError):
            p.observations[("GEO", 2024, INFLATION)] = 2.0


class TestDerive:
    def test_money_growth_from_levels(self):
        p = derive_indicators(parse("AAA,A,2000,BROAD_MONEY_LEVEL,100\nAAA,A,2001,BROAD_MONEY_LEVEL,110\n"))
        assert p.value("AAA", 2001, M3_GROWTH) == pytest.approx(10.0)
        assert p.value("AAA", 2000, M3_GROWTH) is None

    def test_provided_growth_wins(self):
        p = derive_indicators(
            parse(
                "AAA,A,2000,BROAD_MONEY_LEVEL,100\nAAA,A,2001,BROAD_MONEY_LEVEL,110\n"
                "AAA,A,2001,BROAD_MONEY_GROWTH,12.5\n"
            )
        )
        assert p.value("AAA", 2001, M3_GROWTH) == 12.5

    def test_log_gdppc(self):
        p = derive_indicators(parse(f"AAA,A,2000,NY.GDP.PCAP.CD,{math.e ** 2!r}\n"))
        assert p.value("AAA", 2000, LOG_GDP_PER_CAPITA) == pytest.approx(2.0)

    def test_non_positive_gdppc_is_missing(self, caplog):
        p = derive_indicators(parse("AAA,A,2000,NY.GDP.PCAP.CD,-5\n"))
        assert p.value("AAA", 2000, LOG_GDP_PER_CAPITA) is None
        assert "not positive" in caplog.text

    def test_idempotent(self, synthetic_panel):
        assert derive_indicators(synthetic_panel) == synthetic_panel


class TestCarryForward:
    def test_latest_before_cutoff(self):
        p = parse("AAA,A,2019,SI.POV.GINI,30\nAAA,A,2021,SI.POV.GINI,31\nAAA,A,2024,FP.CPI.TOTL.ZG,2\n")
        latest = carry_forward_latest(p, 2024)
        assert latest[("AAA", GINI)] == (31.0, 2021)
        assert latest[("AAA", INFLATION)] == (2.0, 2024)

    def test_absent_when_nothing_before_cutoff(self):
        p = parse("AAA,A,2019,SI.POV.GINI,30\nAAA,A,2022,FP.CPI.TOTL.ZG,2\n")
        assert ("AAA", INFLATION) not in carry_forward_latest(p, 2020)

    def test_cutoff_before_panel(self):
        with pytest.raises(ValueError):
            carry_forward_latest(parse("AAA,A,2019,SI.POV.GINI,30\n"), 2000)


class TestSeries:
    def test_full_range(self, synthetic_panel):
        s = get_series(synthetic_panel, "GEO", INFLATION)
        assert len(s) == 20
        assert s.years[0] == 2005 and s.years[-1] == 2024

    def test_sparse_preserved(self, synthetic_panel):
        s = get_series(synthetic_panel, "CHN", GINI)
        assert 0 < s.present.sum() < 20

    def test_unknown(self, synthetic_panel):
        with pytest.raises(PanelLookupError):
            get_series(synthetic_panel, "GEO", "NOT.A.CODE")
        with pytest.raises(PanelLookupError):
            get_series(synthetic_panel, "ZZZ", INFLATION)

    def test_diff_does_not_bridge_gaps(self):
        s = TimeSeries([2000, 2001, 2002], [1.0, np.nan, 4.0]).diff()
        assert np.isnan(s.values).all()

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            TimeSeries([2001, 2000], [1.0, 2.0])


_values = st.one_of(st.none(), st.floats(-1e6, 1e6, allow_nan=False).map(lambda v: round(v, 6)))


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(st.sampled_from(["AAA", "BBB"]), st.integers(2000, 2010), st.sampled_from([INFLATION, GINI, BROAD_MONEY_LEVEL, BROAD_MONEY_GROWTH, GDP_PER_CAPITA])), _values, min_size=1))
def test_csv_round_trip(cells):
    rows = "".join(f"{c},Name{c},{y},{k},{'' if v is None else repr(v)}\n" for (c, y, k), v in sorted(cells.items()))
    panel = parse(rows)
    again = parse_panel_csv(io.StringIO(panel.to_csv()))
    assert again == panel
