import numpy as np
import pytest

from gindex.lnsr import (
    METRICS,
    compute_lnsr,
    liquidity_speed,
    lnsr_from_scores,
    lnsr_inputs,
    residual_force,
)
from gindex.panel import BROAD_MONEY_GDP, GDP_GROWTH, INFLATION, M3_GROWTH
from gindex.scaling import ScalingBounds


class TestLiquiditySpeed:
    @pytest.mark.parametrize("m3, want", [(100, 1.0), (53.16, 1.881113619), (227.50, 0.4395604396)])
    def test_examples(self, m3, want):
        assert liquidity_speed(m3) == pytest.approx(want, rel=1e-9)

    def test_non_positive(self, caplog):
        assert liquidity_speed(0.0) is None
        assert liquidity_speed(None) is None


class TestResidualForce:
    @pytest.mark.parametrize(
        "args, want", [((5, 7, 3, 1), 0.0), ((6, 7, 3, 1), 1.0), ((2.95, 5.39, 2.79, -0.1), 0.45)]
    )
    def test_examples(self, args, want):
        assert residual_force(*args) == pytest.approx(want, abs=1e-12)

    def test_missing(self):
        assert residual_force(1, None, 2, 3) is None


class TestInputs:
    def test_against_slices(self, make_panel, macro_columns):
        panel = make_panel(macro_columns)
        rows = lnsr_inputs("AAA", panel, window=5)
        v = 100 / macro_columns[BROAD_MONEY_GDP]
        dv = np.concatenate([[np.nan], np.diff(v)])
        pi, g = macro_columns[INFLATION], macro_columns[GDP_GROWTH]
        mu = np.array([panel.value("AAA", 2000 + i, M3_GROWTH) for i in range(20)], dtype=float)
        eps = pi - (mu - g + dv)
        for i, r in enumerate(rows):
            assert r.v == pytest.approx(v[i], abs=1e-12)
            if i >= 4:
                assert r.var_v == pytest.approx(np.var(v[i - 4 : i + 1], ddof=1), abs=1e-12)
            else:
                assert r.var_v is None
            if i >= 5:
                w = eps[i - 4 : i + 1]
                assert r.rms_eps == pytest.approx(np.sqrt(np.mean(w**2)), abs=1e-12)
                assert r.align == pytest.approx(abs(np.corrcoef(dv[i - 4 : i + 1], g[i - 4 : i + 1])[0, 1]), abs=1e-12)
            else:
                assert r.rms_eps is None and r.align is None

    def test_missing_year_drops_window(self, make_panel, macro_columns):
        cols = dict(macro_columns)
        m3 = np.array(cols[BROAD_MONEY_GDP], dtype=float)
        m3[10] = np.nan
        cols[BROAD_MONEY_GDP] = m3
        rows = lnsr_inputs("AAA", make_panel(cols))
        assert all(rows[i].var_v is None for i in range(10, 15))
        assert rows[15].var_v is not None

    def test_best_case_raw_components(self, make_panel):
        n = 12
        g = np.linspace(1, 4, n)
        cols = {
            BROAD_MONEY_GDP: np.full(n, 50.0),
            GDP_GROWTH: g,
            INFLATION: 10.0 - g,
            "BROAD_MONEY_GROWTH": np.full(n, 10.0),
        }
        rows = lnsr_inputs("AAA", make_panel(cols))
        inv_var, inv_rms, align = rows[-1].raw_metrics
        assert inv_var == 1.0 and inv_rms == pytest.approx(1.0)
        # a constant liquidity speed leaves the alignment correlation undefined; it is flagged and set to 0
        assert align == 0.0 and rows[-1].align_degenerate

    def test_score_and_renormalise(self, make_panel, macro_columns):
        panel = make_panel(macro_columns)
        bounds = {m: ScalingBounds(m, 0.0, 1.0, 3) for m in METRICS}
        rows = compute_lnsr("AAA", panel, bounds)
        for r in rows:
            present = [s for s in r.scores if s is not None]
            assert (r.lnsr is None) == (not present)
            if present:
                assert min(present) <= r.lnsr <= max(present)
        assert lnsr_from_scores((None, 60.0, 30.0)) == pytest.approx((0.35 * 60 + 0.30 * 30) / 0.65)
