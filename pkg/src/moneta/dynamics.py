"""Microscopic update rules: one transaction, one turn, one realization.

This module is the readable reference engine. ``moneta.kernel`` holds a
numba-compiled twin of the same update rules used for long runs; the two
are kept draw-for-draw identical (tested in tests/test_kernel.py).

Transaction protocol, in fixed order:

1.  draw agent a uniformly;
2.  draw partner b uniformly among the other agents;
3.  compute offers in both directions on the pre-transfer state;
4.  transfer one unit each way iff both offers exist (bilateral only);
5.  an agent is satisfied iff it received its individually wanted good;
6.  each unsatisfied participant raises its view of every good in its
    want set proportionally — fast below the acceptance threshold, slow
    at or above it (see the module constants);
7.  participants average their view rows elementwise;
8.  each participant's row is renormalized to floor 1 with a fixed total
    excess of (M - 1) / VIEW_CONCENTRATION, distributed in proportion to
    each good's excess over the row minimum;
9.  each satisfied participant consumes its wanted good entirely and
    redraws a new want uniformly over non-self commodities (a first);
10. a participant whose own-product slot is empty produces one unit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .model import MarketState, Params, StrengthRecord, init_state, validate_params
from .rng import RandomStream

#: Fractional per-transaction view increase for a wanted good still below
#: the acceptance threshold. The fast rate: it guarantees that in every
#: realization some commodity eventually crosses the threshold and becomes
#: generally accepted, and it sets the pace at which rivals challenge an
#: incumbent money.
SUB_THRESHOLD_GROWTH = 0.015

#: Fractional per-transaction view increase for a wanted good already at or
#: above the acceptance threshold. The slow rate: it caps how far an
#: incumbent money's view can outrun the pack, so no commodity becomes
#: permanently absorbing and money switching persists at long times.
ABOVE_THRESHOLD_GROWTH = 0.0025

#: After each transaction a participant's view row is rescaled to have
#: minimum exactly 1 and total excess above that floor exactly
#: (M - 1) / VIEW_CONCENTRATION. Larger values concentrate the fixed view
#: budget on fewer goods; this value places the money phase over acceptance
#: thresholds roughly 2..5 with its peak in the interior.
VIEW_CONCENTRATION = 3.4


@dataclass
class TransactionOutcome:
    agent_a: int
    agent_b: int
    gave_a_to_b: Optional[int]
    gave_b_to_a: Optional[int]
    satisfied_a: bool
    satisfied_b: bool

    def __post_init__(self):
        assert (self.gave_a_to_b is None) == (self.gave_b_to_a is None)


@dataclass
class RealizationSummary:
    realization_index: int
    final_v_max: float
    switch_count: int
    wall_time_s: float


def want_set(state: MarketState, k: int, threshold: float) -> set:
    """{W(k)} union {j : V(j,k) >= T}, excluding k's own product."""
    wanted = {int(state.wants[k])}
    above = np.nonzero(state.views[k] >= threshold)[0]
    wanted.update(int(j) for j in above)
    wanted.discard(k)
    return wanted


def select_offer(
    state: MarketState, giver: int, receiver: int, threshold: float
) -> Optional[int]:
    """Best commodity the giver can hand the receiver, or None.

    Among goods the giver holds that are in the receiver's want set,
    pick the one the receiver values most; ties go to the lowest index.
    """
    best_j = -1
    best_v = -np.inf
    views_r = state.views[receiver]
    port_g = state.portfolio[giver]
    w_r = state.wants[receiver]
    m = state.n_commodities
    for j in range(m):
        if port_g[j] < 1 or j == receiver:
            continue
        if j != w_r and views_r[j] < threshold:
            continue
        if views_r[j] > best_v:
            best_v = views_r[j]
            best_j = j
    return None if best_j < 0 else best_j


def normalize_views(row: np.ndarray, m: int) -> np.ndarray:
    """Rescale a view row to floor 1 and fixed total excess; flat rows go to all-1.

    The result has min exactly 1 and sum(result - 1) equal to
    (m - 1) / VIEW_CONCENTRATION, each entry keeping its share of the
    row's excess over its minimum. Every entry stays within [1, M]
    because the whole excess budget is below M - 1.

    The sum is accumulated left to right so the result is bit-identical
    to the compiled kernel's per-element arithmetic.
    """
    lo = row[0]
    tot = 0.0
    for j in range(m):
        v = row[j]
        tot += v
        if v < lo:
            lo = v
    excess = tot - m * lo
    if excess <= 0.0:
        return np.ones_like(row)
    scale = ((m - 1) / VIEW_CONCENTRATION) / excess
    return 1.0 + scale * (row - lo)


def execute_transaction(
    state: MarketState, stream: RandomStream, threshold: float
) -> TransactionOutcome:
    """One pairwise interaction; mutates state in place.

    Consumes exactly the draws listed in the module docstring, in order:
    agent, partner, then one want-redraw per satisfied participant.
    """
    n, m = state.portfolio.shape
    a = stream.randint(n)
    b = stream.randint_skip(n, a)

    offer_ab = select_offer(state, a, b, threshold)
    offer_ba = select_offer(state, b, a, threshold)

    traded = offer_ab is not None and offer_ba is not None
    if traded:
        state.portfolio[a, offer_ab] -= 1
        state.portfolio[b, offer_ab] += 1
        state.portfolio[b, offer_ba] -= 1
        state.portfolio[a, offer_ba] += 1
    else:
        offer_ab = offer_ba = None

    satisfied_a = traded and offer_ba == state.wants[a]
    satisfied_b = traded and offer_ab == state.wants[b]

    for x, satisfied in ((a, satisfied_a), (b, satisfied_b)):
        if satisfied:
            continue
        row = state.views[x]
        w_x = state.wants[x]
        for j in range(m):
            if j == w_x or (j != x and row[j] >= threshold):
                rate = (
                    ABOVE_THRESHOLD_GROWTH
                    if row[j] >= threshold
                    else SUB_THRESHOLD_GROWTH
                )
                row[j] += rate * row[j]

    mean_row = (state.views[a] + state.views[b]) * 0.5
    normalized = normalize_views(mean_row, m)
    state.views[a] = normalized
    state.views[b] = normalized

    for x, satisfied in ((a, satisfied_a), (b, satisfied_b)):
        if satisfied:
            state.portfolio[x, state.wants[x]] = 0
            state.wants[x] = (
                stream.randint_skip(m, x) if x < m else stream.randint(m)
            )
    for x in (a, b):
        if x < m and state.portfolio[x, x] == 0:
            state.portfolio[x, x] = 1

    return TransactionOutcome(
        agent_a=a,
        agent_b=b,
        gave_a_to_b=offer_ab,
        gave_b_to_a=offer_ba,
        satisfied_a=bool(satisfied_a),
        satisfied_b=bool(satisfied_b),
    )


def run_turn(
    state: MarketState, stream: RandomStream, threshold: float
) -> List[TransactionOutcome]:
    """N consecutive transactions, then the clock advances by one turn."""
    outcomes = [
        execute_transaction(state, stream, threshold) for _ in range(state.n_agents)
    ]
    state.t += 1
    return outcomes


def run_realization(
    p: Params,
    realization_index: int,
    recorder: Optional[Callable[[StrengthRecord], None]] = None,
    engine: str = "fast",
) -> RealizationSummary:
    """One full trajectory: init, ``turns_horizon`` turns, one record per turn.

    ``engine='fast'`` uses the numba kernel (records carry no full
    strength vector); ``engine='reference'`` runs this module's pure
    Python path and records the full strength vector.
    """
    validate_params(p)
    start = time.perf_counter()
    if engine == "fast":
        from .kernel import simulate

        v_max, j_max = simulate(p, realization_index)
        if recorder is not None:
            for t in range(p.turns_horizon):
                recorder(StrengthRecord(t=t + 1, v_max=float(v_max[t]), j_max=int(j_max[t])))
    elif engine == "reference":
        stream = RandomStream.for_realization(p.base_seed, realization_index)
        state = init_state(p, stream)
        v_max = np.empty(p.turns_horizon)
        j_max = np.empty(p.turns_horizon, dtype=np.int64)
        for t in range(p.turns_horizon):
            run_turn(state, stream, p.threshold)
            # accumulated agent-by-agent so v_max is bit-identical to the
            # compiled kernel's records
            strength = np.empty(p.m)
            for j in range(p.m):
                s = 0.0
                for k in range(p.n):
                    s += state.views[k, j]
                strength[j] = s / p.n
            j = int(np.argmax(strength))
            v_max[t] = strength[j]
            j_max[t] = j
            if recorder is not None:
                recorder(
                    StrengthRecord(t=t + 1, v_max=float(v_max[t]), j_max=j, strength=strength)
                )
    else:
        raise ValueError(f"unknown engine {engine!r}")

    switches = int(np.count_nonzero(j_max[1:] != j_max[:-1]))
    return RealizationSummary(
        realization_index=realization_index,
        final_v_max=float(v_max[-1]),
        switch_count=switches,
        wall_time_s=time.perf_counter() - start,
    )
