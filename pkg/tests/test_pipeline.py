import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gindex.datasets import make_synthetic_panel, synthetic_panel_path
from gindex.pipeline import METRICS, GIEstimator, pillar_matrix


@pytest.fixture(scope="module")
def fitted(synthetic_panel):
    est = GIEstimator()
    return est, est.fit_transform(synthetic_panel)


class TestDatasets:
    def test_bundled_equals_regeneration(self):
        assert synthetic_panel_path().read_text(encoding="utf-8") == make_synthetic_panel()

    def test_shape(self, synthetic_panel):
        assert len(synthetic_panel.countries) == 9
        assert synthetic_panel.years == (2005, 2024)


class TestEstimator:
    def test_params_round_trip(self):
        est = GIEstimator(window=6, q_low=0.1)
        assert clone(est).get_params() == est.get_params()

    def test_not_fitted(self, synthetic_panel):
        with pytest.raises(NotFittedError):
            GIEstimator().transform(synthetic_panel)

    def test_rejects_non_panel(self):
        with pytest.raises(TypeError):
            GIEstimator().fit(np.zeros((3, 3)))

    def test_invalid_params(self, synthetic_panel):
        with pytest.raises(ValueError):
            GIEstimator(gi_weights=(1, 1)).fit(synthetic_panel)
        with pytest.raises(ValueError):
            GIEstimator(r_squared_scoring="other").fit(synthetic_panel)

    def test_bounds_for_every_metric(self, fitted):
        est, _ = fitted
        assert set(est.bounds_) == set(METRICS)

    def test_records(self, fitted):
        _, result = fitted
        assert len(result.records) == 9 * 20
        keys = [(r.country, r.year) for r in result]
        assert keys == sorted(keys)

    def test_composite_invariants(self, fitted):
        _, result = fitted
        m = pillar_matrix(result)
        for row in m:
            present = row[:3][~np.isnan(row[:3])]
            if present.size:
                assert present.min() - 1e-9 <= row[3] <= present.max() + 1e-9
            else:
                assert np.isnan(row[3])

    def test_missing_gini_renormalises(self, fitted):
        _, result = fitted
        aze = result.for_country("AZE")
        assert all(r.irs.irs is None for r in aze)
        assert any(r.gi.gi is not None for r in aze)

    def test_direct_r_squared(self, synthetic_panel):
        result = GIEstimator(r_squared_scoring="direct").fit_transform(synthetic_panel)
        b = result.bounds["irs.r_squared"]
        assert (b.p5, b.p95) == (0.0, 1.0)

    def test_deterministic(self, synthetic_panel):
        a = pillar_matrix(GIEstimator().fit_transform(synthetic_panel))
        b = pillar_matrix(GIEstimator().fit_transform(synthetic_panel))
        np.testing.assert_array_equal(a, b)
