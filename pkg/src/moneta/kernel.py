"""Numba-compiled twin of the reference engine in ``moneta.dynamics``.

Implements the identical transaction protocol with the identical draw
order and the identical splitmix64 stream, so trajectories produced here
are bit-equal (portfolio, views, wants) to the reference path. Long runs
(horizon 10^5..10^6) are only practical through this kernel.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np
from numba import njit

from .dynamics import (
    ABOVE_THRESHOLD_GROWTH,
    SUB_THRESHOLD_GROWTH,
    VIEW_CONCENTRATION,
)
from .model import Params, validate_params
from .rng import mix_seed

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


@njit(cache=True, inline="always")
def _next_u64(state):
    s = state + _GOLDEN
    return s, _mix64(s)


@njit(cache=True, inline="always")
def _randint(state, n):
    state, r = _next_u64(state)
    return state, np.int64(r % _U64(n))


@njit(cache=True, inline="always")
def _randint_skip(state, n, skip):
    state, r = _randint(state, n - 1)
    if r >= skip:
        r += 1
    return state, r


@njit(cache=True, inline="always")
def _select_offer(P, V, W, giver, receiver, threshold, m):
    best_j = np.int64(-1)
    best_v = -1.0
    w_r = W[receiver]
    for j in range(m):
        if P[giver, j] < 1 or j == receiver:
            continue
        if j != w_r and V[receiver, j] < threshold:
            continue
        if V[receiver, j] > best_v:
            best_v = V[receiver, j]
            best_j = j
    return best_j


# the growth rates and view budget are passed in as arguments (rather than
# read as globals) so numba's on-disk cache can never go stale against the
# constants defined in moneta.dynamics
@njit(cache=True)
def _simulate(n, m, threshold, horizon, seed_state, rate_sub, rate_above,
              excess_budget, v_max_out, j_max_out):
    state = _U64(seed_state)

    P = np.zeros((n, m), dtype=np.int64)
    for k in range(min(n, m)):
        P[k, k] = 1
    V = np.ones((n, m), dtype=np.float64)
    W = np.empty(n, dtype=np.int64)
    for k in range(n):
        if k < m:
            state, W[k] = _randint_skip(state, m, k)
        else:
            state, W[k] = _randint(state, m)

    for t in range(horizon):
        for _ in range(n):
            state, a = _randint(state, n)
            state, b = _randint_skip(state, n, a)

            offer_ab = _select_offer(P, V, W, a, b, threshold, m)
            offer_ba = _select_offer(P, V, W, b, a, threshold, m)
            traded = offer_ab >= 0 and offer_ba >= 0
            if traded:
                P[a, offer_ab] -= 1
                P[b, offer_ab] += 1
                P[b, offer_ba] -= 1
                P[a, offer_ba] += 1

            satisfied_a = traded and offer_ba == W[a]
            satisfied_b = traded and offer_ab == W[b]
            if not satisfied_a:
                w_a = W[a]
                for j in range(m):
                    if j == w_a or (j != a and V[a, j] >= threshold):
                        if V[a, j] >= threshold:
                            V[a, j] += rate_above * V[a, j]
                        else:
                            V[a, j] += rate_sub * V[a, j]
            if not satisfied_b:
                w_b = W[b]
                for j in range(m):
                    if j == w_b or (j != b and V[b, j] >= threshold):
                        if V[b, j] >= threshold:
                            V[b, j] += rate_above * V[b, j]
                        else:
                            V[b, j] += rate_sub * V[b, j]

            lo = np.inf
            tot = 0.0
            for j in range(m):
                mean = (V[a, j] + V[b, j]) * 0.5
                V[a, j] = mean
                tot += mean
                if mean < lo:
                    lo = mean
            excess = tot - m * lo
            if excess <= 0.0:
                for j in range(m):
                    V[a, j] = 1.0
                    V[b, j] = 1.0
            else:
                scale = excess_budget / excess
                for j in range(m):
                    v = 1.0 + scale * (V[a, j] - lo)
                    V[a, j] = v
                    V[b, j] = v

            if satisfied_a:
                P[a, W[a]] = 0
                if a < m:
                    state, W[a] = _randint_skip(state, m, a)
                else:
                    state, W[a] = _randint(state, m)
            if satisfied_b:
                P[b, W[b]] = 0
                if b < m:
                    state, W[b] = _randint_skip(state, m, b)
                else:
                    state, W[b] = _randint(state, m)
            if a < m and P[a, a] == 0:
                P[a, a] = 1
            if b < m and P[b, b] == 0:
                P[b, b] = 1

        best_j = 0
        best_s = -1.0
        for j in range(m):
            s = 0.0
            for k in range(n):
                s += V[k, j]
            s /= n
            if s > best_s:
                best_s = s
                best_j = j
        v_max_out[t] = best_s
        j_max_out[t] = best_j

    return P, V, W


def simulate(p: Params, realization_index: int) -> Tuple[np.ndarray, np.ndarray]:
    """Run one realization; returns per-turn (v_max, j_max) arrays (0-based j)."""
    validate_params(p)
    v_max = np.empty(p.turns_horizon, dtype=np.float64)
    j_max = np.empty(p.turns_horizon, dtype=np.int64)
    _simulate(
        p.n,
        p.m,
        float(p.threshold),
        p.turns_horizon,
        np.uint64(mix_seed(p.base_seed, realization_index)),
        SUB_THRESHOLD_GROWTH,
        ABOVE_THRESHOLD_GROWTH,
        (p.m - 1) / VIEW_CONCENTRATION,
        v_max,
        j_max,
    )
    return v_max, j_max


def simulate_full(p: Params, realization_index: int):
    """Like :func:`simulate` but also returns the final (P, V, W) state."""
    validate_params(p)
    v_max = np.empty(p.turns_horizon, dtype=np.float64)
    j_max = np.empty(p.turns_horizon, dtype=np.int64)
    P, V, W = _simulate(
        p.n,
        p.m,
        float(p.threshold),
        p.turns_horizon,
        np.uint64(mix_seed(p.base_seed, realization_index)),
        SUB_THRESHOLD_GROWTH,
        ABOVE_THRESHOLD_GROWTH,
        (p.m - 1) / VIEW_CONCENTRATION,
        v_max,
        j_max,
    )
    return v_max, j_max, P, V, W
