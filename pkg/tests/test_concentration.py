import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iceberg.capability import capability_profile
from iceberg.concentration import (MODERATE, MOST_CONCENTRATED, MOST_DISTRIBUTED, IndustryShares,
                                   hhi, hhi_tier, industry_shares, round_half_up,
                                   state_concentration)
from iceberg.errors import InputError
from iceberg.index import compute_exposures
from iceberg.synth import oracle_hhi


def _hhi(values):
    return hhi(industry_shares(dict(enumerate(values)))).value


def test_shares_basic():
    s = industry_shares({"a": 30.0, "b": 10.0, "c": 0.0})
    assert s.shares == {"a": 0.75, "b": 0.25}


def test_shares_reject_zero_and_negative():
    with pytest.raises(InputError, match="zero"):
        industry_shares({"a": 0.0, "b": 0.0})
    with pytest.raises(InputError, match="negative"):
        industry_shares({"a": 1.0, "b": -1.0})
    with pytest.raises(InputError):
        IndustryShares("x", {"a": 0.5, "b": 0.4})


def test_single_industry():
    score = hhi(industry_shares({"a": 5.0}))
    assert score.value == 10000.0 and score.tier == MOST_CONCENTRATED


def test_uniform_ten():
    assert _hhi([1.0] * 10) == pytest.approx(1000.0, rel=1e-12)


def test_half_and_half():
    assert _hhi([1.0, 1.0]) == 5000.0


def test_integer_fixtures():
    # shares in basis points; the integer HHI is sum(bp^2) / 10000
    iowa = [2341, 1971, 1464, 1201, 816, 576, 485, 432, 406, 308]
    delaware = [3052, 2082, 1362, 758, 568, 524, 515, 487, 423, 229]
    for bp, want, tier in ((iowa, 1463, MOST_DISTRIBUTED), (delaware, 1741, MOST_CONCENTRATED)):
        assert sum(bp) == 10000
        exact = sum(b * b for b in bp) / 10000
        assert round_half_up(exact) == want
        got = _hhi([float(b) for b in bp])
        assert math.isclose(got, exact, rel_tol=1e-12)
        assert round_half_up(got) == want
        assert hhi_tier(got) == tier


@pytest.mark.parametrize("value,tier", [
    (1580, MOST_DISTRIBUTED), (1580.49, MOST_DISTRIBUTED), (1580.5, MODERATE),
    (1581, MODERATE), (1737, MODERATE), (1737.4, MODERATE), (1737.5, MOST_CONCENTRATED),
    (1738, MOST_CONCENTRATED), (0, MOST_DISTRIBUTED), (10000, MOST_CONCENTRATED),
])
def test_tier_boundaries(value, tier):
    assert hhi_tier(value) == tier


def test_round_half_up():
    assert [round_half_up(v) for v in (0.5, 1.5, 2.5, 2.49)] == [1, 2, 3, 2]


def test_seed42_matches_oracle(seed42):
    m, t = seed42.load_taxonomy(), seed42.load_employment()
    ex = compute_exposures(m, capability_profile(seed42.load_tool_catalog()))
    industry_of = {o.code: o.industry for o in m.occupations}
    records = state_concentration(ex, t, industry_of)
    assert [r["state"] for r in records] == list(t.states)
    for r in records:
        assert r["hhi"] == pytest.approx(oracle_hhi(seed42, r["state"]), rel=1e-9)
        assert r["tier"] == hhi_tier(r["hhi"])
        assert math.isclose(math.fsum(r["shares"].values()), 1.0, rel_tol=1e-12)


positive = st.lists(st.floats(1e-3, 1e9), min_size=1, max_size=30)


@settings(max_examples=200, deadline=None)
@given(values=positive)
def test_hhi_bounds(values):
    v = _hhi(values)
    n = len(values)
    assert 10000.0 / n * (1 - 1e-12) <= v <= 10000.0 * (1 + 1e-12)
    assert hhi_tier(v) in (MOST_DISTRIBUTED, MODERATE, MOST_CONCENTRATED)


@settings(max_examples=200, deadline=None)
@given(values=st.lists(st.floats(1e-3, 1e9), min_size=2, max_size=30), data=st.data())
def test_merging_raises_hhi(values, data):
    i = data.draw(st.integers(0, len(values) - 2))
    merged = values[:i] + [values[i] + values[i + 1]] + values[i + 2:]
    assert _hhi(merged) >= _hhi(values) * (1 - 1e-12)


@settings(max_examples=200, deadline=None)
@given(values=positive, k=st.floats(1e-3, 1e3), seed=st.randoms(use_true_random=False))
def test_relabel_and_scale_invariance(values, k, seed):
    base = _hhi(values)
    shuffled = list(values)
    seed.shuffle(shuffled)
    assert math.isclose(_hhi(shuffled), base, rel_tol=1e-12)
    assert math.isclose(_hhi([v * k for v in values]), base, rel_tol=1e-9)
