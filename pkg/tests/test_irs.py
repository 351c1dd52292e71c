import numpy as np
import pytest

from gindex.irs import (
    METRICS,
    IrsComponents,
    compute_irs,
    delta_gini_series,
    fit_inequality_model,
    irs_from_scores,
    irs_inputs,
    smoothing_signal,
)
from gindex.panel import GDP_PER_CAPITA, GINI, INFLATION, UNEMPLOYMENT, TimeSeries
from gindex.scaling import ScalingBounds, invert_bad_metric, score


def series(values, first=2000):
    return TimeSeries(np.arange(first, first + len(values)), values)


class TestInequalityModel:
    def test_exact_fixture(self, make_panel):
        rng = np.random.default_rng(0)
        pi, u = rng.normal(5, 2, 12), rng.normal(8, 1, 12)
        gdppc = 1000 * np.exp(rng.normal(0, 0.3, 12))
        panel = make_panel({INFLATION: pi, UNEMPLOYMENT: u, GDP_PER_CAPITA: gdppc, GINI: 30 + 0.5 * pi - 0.2 * u})
        model = fit_inequality_model("AAA", panel)
        np.testing.assert_allclose(model.fit.coefficients, [30, 0.5, -0.2, 0], atol=1e-9)
        assert model.r_squared == pytest.approx(1.0)

    def test_noisy_matches_normal_equations(self, make_panel, macro_columns):
        panel = make_panel(macro_columns)
        model = fit_inequality_model("AAA", panel)
        X = np.column_stack([np.ones(20), macro_columns[INFLATION], macro_columns[UNEMPLOYMENT], np.log(macro_columns[GDP_PER_CAPITA])])
        y = macro_columns[GINI]
        beta = np.linalg.solve(X.T @ X, X.T @ y)
        np.testing.assert_allclose(model.fit.coefficients, beta, rtol=1e-9, atol=1e-9)

    def test_coverage_gate(self, make_panel, macro_columns):
        cols = dict(macro_columns)
        gini = np.full(20, np.nan)
        gini[:5] = macro_columns[GINI][:5]
        cols[GINI] = gini
        assert fit_inequality_model("AAA", make_panel(cols), min_obs=8) is None

    def test_singular_design_is_absent(self, make_panel, macro_columns):
        cols = dict(macro_columns)
        cols[UNEMPLOYMENT] = np.full(20, 7.0)
        assert fit_inequality_model("AAA", make_panel(cols)) is None


class TestDeltaGini:
    def test_absolute_change(self):
        d = delta_gini_series(series([36.0, 34.5], first=2019))
        assert d.get(2020) == pytest.approx(1.5)

    def test_no_bridging(self):
        d = delta_gini_series(series([36.0, np.nan, 34.0], first=2019))
        assert d.get(2020) is None and d.get(2021) is None

    def test_constant(self):
        d = delta_gini_series(series([30.0] * 5))
        assert list(d.values[1:]) == [0.0] * 4


class TestSmoothing:
    def test_linear_is_one(self):
        s = smoothing_signal(series(np.arange(10) * 0.3 + 30), 5)
        np.testing.assert_allclose(s.values[4:], 1.0, atol=1e-12)
        assert np.isnan(s.values[:4]).all()

    def test_alternating(self):
        s = smoothing_signal(series([30, 32, 30, 32, 30]), 5)
        assert s.values[-1] == pytest.approx(0.2)

    def test_sparse_is_missing(self):
        s = smoothing_signal(series([30, np.nan, 31, np.nan, 32, np.nan, 33]), 5)
        assert np.isnan(s.values).all()

    def test_against_slices(self):
        rng = np.random.default_rng(11)
        g = rng.normal(35, 1, 15)
        s = smoothing_signal(series(g), 5)
        for i in range(4, 15):
            w = g[i - 4 : i + 1]
            d2 = np.diff(w, 2)
            assert s.values[i] == pytest.approx(1 / (1 + np.sqrt(np.mean(d2**2))), abs=1e-12)


class TestScore:
    def test_constant_scores(self):
        assert irs_from_scores((70, 70, 70)) == pytest.approx(70)

    def test_renormalised(self):
        assert irs_from_scores((80, None, 40)) == pytest.approx(66.6666666667)

    def test_all_missing(self):
        assert irs_from_scores((None, None, None)) is None

    def test_compute_irs_uses_bounds(self):
        b = {m: ScalingBounds(m, 0.0, 1.0, 5) for m in METRICS}
        comp = IrsComponents("AAA", 2020, r_squared=0.5, abs_dgini=1.0, smoothing=None)
        out = compute_irs("AAA", 2020, comp, b)
        assert out.scores == (50.0, 50.0, None)
        assert out.irs == pytest.approx(50.0)

    def test_inputs_per_year(self, make_panel, macro_columns):
        panel = make_panel(macro_columns)
        rows = irs_inputs("AAA", panel)
        assert len(rows) == 20
        assert len({r.r_squared for r in rows}) == 1
        g = macro_columns[GINI]
        assert rows[3].abs_dgini == pytest.approx(abs(g[3] - g[2]), abs=1e-12)
        assert rows[3].raw_metrics[1] == invert_bad_metric(rows[3].abs_dgini)
        assert score(0.5, ScalingBounds("m", 0, 1, 1)) == 50.0
