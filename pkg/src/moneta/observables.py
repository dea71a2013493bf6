"""Macroscopic observables: strength, money identity, switching, lifetimes.

All functions here are pure; the money identity j_max is sampled once per
turn (the model's unit of time), and lifetimes are the gaps between
consecutive changes of j_max, so the segments before the first change and
after the last one never enter the statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .model import MarketState


@dataclass
class SwitchRecord:
    """Turn indices (1-based, turn-end sampling) at which j_max changed."""

    realization_index: int
    change_times: List[int]

    def __post_init__(self):
        assert all(
            t1 < t2 for t1, t2 in zip(self.change_times, self.change_times[1:])
        ), "change times must be strictly increasing"


@dataclass(frozen=True)
class LifetimeSample:
    """One money lifetime in turns."""

    tau: int
    realization_index: int
    threshold: float


def commodity_strength(state: MarketState, j: int) -> float:
    """Agent-averaged view of commodity j; lies in [1, M]."""
    return float(state.views[:, j].sum() / state.n_agents)


def money_strength(state: MarketState) -> Tuple[float, int]:
    """(max strength, argmax commodity); ties broken by lowest index."""
    strength = state.views.sum(axis=0) / state.n_agents
    j = int(np.argmax(strength))
    return float(strength[j]), j


def detect_switches(
    jmax_series: Sequence[int], realization_index: int
) -> SwitchRecord:
    """Change points of the per-turn money identity series.

    The series is read as turn-end samples for turns 1..L; a change time t
    means j_max at turn t differs from turn t-1, so the earliest possible
    change time is 2.
    """
    s = np.asarray(jmax_series)
    if s.size == 0:
        raise ValueError("jmax series is empty")
    changed = np.nonzero(s[1:] != s[:-1])[0] + 2
    return SwitchRecord(
        realization_index=realization_index, change_times=[int(t) for t in changed]
    )


def lifetimes_from_switches(
    rec: SwitchRecord, threshold: float = float("nan")
) -> List[LifetimeSample]:
    """Consecutive differences of the change times.

    m change times yield m-1 lifetimes; the leading and trailing dominance
    segments are censored by construction.
    """
    ts = rec.change_times
    return [
        LifetimeSample(
            tau=t2 - t1, realization_index=rec.realization_index, threshold=threshold
        )
        for t1, t2 in zip(ts, ts[1:])
    ]


def filter_lifetimes(
    samples: Sequence[LifetimeSample], low: int, high: int
) -> List[LifetimeSample]:
    """Keep samples with low <= tau <= high (finite-observation-time guard)."""
    if low >= high:
        raise ValueError(f"cutoffs must satisfy low < high, got {low} >= {high}")
    return [s for s in samples if low <= s.tau <= high]
