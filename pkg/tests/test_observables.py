"""Observable oracles: strength vs brute force, switch/lifetime round-trips."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from moneta import (
    LifetimeSample,
    MarketState,
    SwitchRecord,
    commodity_strength,
    detect_switches,
    filter_lifetimes,
    lifetimes_from_switches,
    money_strength,
)


def random_state(rng, n, m):
    views = rng.uniform(1.0, m, size=(n, m))
    wants = np.array([(k + 1) % m for k in range(n)])
    return MarketState(
        t=0,
        portfolio=np.eye(n, m, dtype=np.int64),
        views=views,
        wants=wants,
    )


def brute_force_strength(views, j):
    # plain elementwise definition: average the column entry by entry
    total = 0.0
    for k in range(views.shape[0]):
        total += views[k, j]
    return total / views.shape[0]


def test_commodity_strength_matches_brute_force_100_matrices():
    rng = np.random.default_rng(20240817)
    for _ in range(100):
        n = int(rng.integers(2, 30))
        m = int(rng.integers(2, 30))
        state = random_state(rng, n, m)
        for j in range(m):
            assert commodity_strength(state, j) == pytest.approx(
                brute_force_strength(state.views, j), abs=1e-12
            )


def test_money_strength_matches_brute_force_100_matrices():
    rng = np.random.default_rng(987654321)
    for _ in range(100):
        n = int(rng.integers(2, 30))
        m = int(rng.integers(2, 30))
        state = random_state(rng, n, m)
        strengths = [brute_force_strength(state.views, j) for j in range(m)]
        expect_v = max(strengths)
        expect_j = strengths.index(expect_v)
        v, j = money_strength(state)
        assert v == pytest.approx(expect_v, abs=1e-12)
        assert j == expect_j


def test_money_strength_tie_breaks_low_index():
    views = np.full((4, 3), 2.0)
    state = MarketState(
        t=0,
        portfolio=np.eye(4, 3, dtype=np.int64),
        views=views,
        wants=np.array([1, 2, 0, 0]),
    )
    _, j = money_strength(state)
    assert j == 0


def test_detect_switches_simple():
    rec = detect_switches([3, 3, 5, 5, 5, 2, 2], realization_index=7)
    assert rec.realization_index == 7
    assert rec.change_times == [3, 6]


def test_detect_switches_constant_series():
    assert detect_switches([4] * 10, 0).change_times == []


def test_detect_switches_rejects_empty():
    with pytest.raises(ValueError):
        detect_switches([], 0)


def test_lifetimes_are_consecutive_differences():
    rec = SwitchRecord(realization_index=1, change_times=[2, 12, 13, 113])
    samples = lifetimes_from_switches(rec, threshold=2.5)
    assert [s.tau for s in samples] == [10, 1, 100]
    assert all(s.realization_index == 1 and s.threshold == 2.5 for s in samples)


def test_switch_record_requires_increasing_times():
    with pytest.raises(AssertionError):
        SwitchRecord(realization_index=0, change_times=[5, 5])


@given(
    st.lists(st.integers(min_value=1, max_value=200), min_size=1, max_size=40),
    st.integers(min_value=2, max_value=100),
)
def test_synthetic_switch_sequence_round_trips_exactly(taus, first_change):
    """Build a j_max series whose reigns last exactly ``taus``; recover them."""
    change_times = [first_change]
    for tau in taus:
        change_times.append(change_times[-1] + tau)
    horizon = change_times[-1] + 5
    series = np.zeros(horizon, dtype=np.int64)
    # turn t is series[t-1]; identity flips at each change time
    ident = 0
    ct = set(change_times)
    for t in range(2, horizon + 1):
        if t in ct:
            ident += 1
        series[t - 1] = ident
    rec = detect_switches(series, 0)
    assert rec.change_times == change_times
    recovered = [s.tau for s in lifetimes_from_switches(rec)]
    assert recovered == taus


@given(st.lists(st.integers(min_value=1, max_value=10**6), max_size=50))
def test_filter_lifetimes_window(taus):
    samples = [LifetimeSample(tau=t, realization_index=0, threshold=2.0) for t in taus]
    kept = filter_lifetimes(samples, 10, 10**5)
    assert [s.tau for s in kept] == [t for t in taus if 10 <= t <= 10**5]


def test_filter_lifetimes_rejects_bad_cutoffs():
    with pytest.raises(ValueError):
        filter_lifetimes([], 100, 100)
