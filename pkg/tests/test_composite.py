import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gindex.composite import (
    GiRecord,
    GiWeights,
    aggregate_gi,
    attach_contributions,
    decompose_dlog,
    descriptive_stats,
    regional_mean,
)

pillar = st.floats(0.01, 100)
maybe = st.one_of(st.none(), pillar)


class TestAggregate:
    def test_equal(self):
        assert aggregate_gi((50, 50, 50)) == pytest.approx(50)

    def test_direct_evaluation(self):
        want = math.exp(0.35 * math.log(69.02) + 0.35 * math.log(74.40) + 0.30 * math.log(16.08))
        assert aggregate_gi((69.02, 74.40, 16.08)) == pytest.approx(want, abs=1e-12)
        assert aggregate_gi((69.02, 74.40, 16.08)) == pytest.approx(45.77, abs=0.01)

    def test_zero_annihilates(self):
        assert aggregate_gi((40, 60, 0)) == 0.0

    def test_floor(self):
        assert aggregate_gi((40, 60, 0), epsilon_floor=0.01) > 0

    def test_all_missing(self):
        assert aggregate_gi((None, None, None)) is None

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            GiWeights(0.5, 0.5, 0.0)

    @settings(max_examples=300, deadline=None)
    @given(pillar, pillar, pillar, st.floats(0.01, 0.5))
    def test_monotone(self, a, b, c, bump):
        assert aggregate_gi((a + bump, b, c)) > aggregate_gi((a, b, c)) or a + bump == a

    @settings(max_examples=300, deadline=None)
    @given(pillar, pillar, pillar, st.floats(0.1, 2), st.floats(0.1, 2), st.floats(0.1, 2))
    def test_symmetry(self, a, b, c, w1, w2, w3):
        g1 = aggregate_gi((a, b, c), GiWeights(w1, w2, w3))
        g2 = aggregate_gi((b, a, c), GiWeights(w2, w1, w3))
        assert g1 == pytest.approx(g2, rel=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(maybe, maybe, maybe)
    def test_presence(self, a, b, c):
        gi = aggregate_gi((a, b, c))
        present = [p for p in (a, b, c) if p is not None]
        assert (gi is None) == (not present)
        if present:
            assert min(present) <= gi <= max(present)


class TestDecompose:
    def rec(self, year, pillars):
        return GiRecord("AAA", year, aggregate_gi(pillars), tuple(pillars))

    def test_irs_doubles(self):
        c = decompose_dlog(self.rec(1, (20, 50, 50)), self.rec(2, (40, 50, 50)))
        assert c.irs == pytest.approx(0.35 * math.log(2), abs=1e-12)
        assert round(c.irs, 6) == 0.242602
        assert c.lnsr == 0 and c.ifc == 0

    def test_constant(self):
        c = decompose_dlog(self.rec(1, (20, 50, 50)), self.rec(2, (20, 50, 50)))
        assert tuple(c) == (0.0, 0.0, 0.0)

    def test_missing(self):
        recs = attach_contributions([self.rec(1, (20, 50, 50)), self.rec(2, (None, 50, 50)), self.rec(4, (20, 50, 50))])
        assert recs[1].contributions is None and recs[1].reason == "missing_irs_curr"
        assert recs[2].reason == "no_previous_year"

    @settings(max_examples=300, deadline=None)
    @given(st.tuples(pillar, pillar, pillar), st.tuples(pillar, pillar, pillar))
    def test_identity(self, p0, p1):
        c = decompose_dlog(self.rec(1, p0), self.rec(2, p1))
        d = math.log(aggregate_gi(p1)) - math.log(aggregate_gi(p0))
        assert abs(c.total - d) <= 1e-12


class TestRegions:
    def test_single_member(self):
        row = regional_mean([{"gi": 72.33, "irs": 86.22, "lnsr": 81.23, "ifc": 21.28}], "EAS")
        assert row["gi"] == 72.33 and row["ifc"] == 21.28 and row.n_members == 1

    def test_two_members(self):
        assert regional_mean([{"gi": 52.52}, {"gi": 41.48}], "R")["gi"] == pytest.approx(47.0)

    def test_fieldwise_counts(self):
        row = regional_mean([{"irs": 10.0}, {"irs": None}, {"irs": 30.0}], "R")
        assert row["irs"] == 20.0 and row.counts["irs"] == 2

    def test_empty(self):
        row = regional_mean([], "R")
        assert all(v is None for v in row.values.values())


class TestStats:
    def test_hand(self):
        s = descriptive_stats([1, 2, 3])
        assert (s.mean, s.std, s.min, s.max, s.last) == (2, 1, 1, 3, 3)

    def test_single(self):
        s = descriptive_stats([7])
        assert s.std is None and s.last == 7

    def test_empty(self):
        assert descriptive_stats([None, None]) is None

    def test_oracle(self):
        x = np.random.default_rng(0).normal(50, 10, 20)
        s = descriptive_stats(list(x) + [None])
        assert s.mean == pytest.approx(sum(x) / 20, abs=1e-12)
        assert s.std == pytest.approx(math.sqrt(sum((v - s.mean) ** 2 for v in x) / 19), abs=1e-12)
        assert s.last == x[-1]
