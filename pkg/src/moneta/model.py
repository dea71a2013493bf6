"""Domain types and initialization for the commodity-exchange market.

Conventions: agents and commodities are 0-based internally; all files and
CSV columns written by the runner use 1-based indices. Agent k is the sole
producer of commodity k, so the portfolio and view matrices are square
when M = N (the default).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .rng import RandomStream

DEFAULT_LIFETIME_LOW_CUTOFF = 10
DEFAULT_LIFETIME_HIGH_CUTOFF = 10**5


class MonetaError(Exception):
    """Base class for all package errors."""


class ParamsError(MonetaError, ValueError):
    """Invalid experiment parameters. ``code`` identifies the violated rule."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Params:
    """Immutable experiment configuration.

    ``n_commodities`` defaults to ``n_agents`` (one producer per good).
    """

    n_agents: int
    threshold: float
    turns_horizon: int
    n_realizations: int = 1
    base_seed: int = 0
    n_commodities: Optional[int] = None
    lifetime_low_cutoff: int = DEFAULT_LIFETIME_LOW_CUTOFF
    lifetime_high_cutoff: int = DEFAULT_LIFETIME_HIGH_CUTOFF

    def __post_init__(self):
        if self.n_commodities is None:
            object.__setattr__(self, "n_commodities", self.n_agents)

    @property
    def n(self) -> int:
        return self.n_agents

    @property
    def m(self) -> int:
        return self.n_commodities  # type: ignore[return-value]


def validate_params(p: Params) -> Params:
    """Return ``p`` unchanged if every invariant holds, else raise ParamsError."""
    if not isinstance(p.n_agents, int) or p.n_agents <= 1:
        raise ParamsError("n_agents", f"n_agents must be an integer > 1, got {p.n_agents!r}")
    if not isinstance(p.n_commodities, int) or p.n_commodities <= 1:
        raise ParamsError(
            "n_commodities", f"n_commodities must be an integer > 1, got {p.n_commodities!r}"
        )
    if not (p.threshold >= 1.0):
        raise ParamsError("threshold", f"threshold must satisfy T >= 1, got {p.threshold!r}")
    if not isinstance(p.turns_horizon, int) or p.turns_horizon <= 0:
        raise ParamsError("turns_horizon", f"turns_horizon must be a positive integer, got {p.turns_horizon!r}")
    if not isinstance(p.n_realizations, int) or p.n_realizations <= 0:
        raise ParamsError(
            "n_realizations", f"n_realizations must be a positive integer, got {p.n_realizations!r}"
        )
    if not isinstance(p.base_seed, int) or not (0 <= p.base_seed < 2**64):
        raise ParamsError("base_seed", f"base_seed must be an unsigned 64-bit integer, got {p.base_seed!r}")
    if p.lifetime_low_cutoff <= 0:
        raise ParamsError("lifetime_low_cutoff", "lifetime_low_cutoff must be positive")
    if p.lifetime_low_cutoff >= p.lifetime_high_cutoff:
        raise ParamsError(
            "cutoff_order",
            f"lifetime cutoffs must satisfy low < high, got "
            f"{p.lifetime_low_cutoff} >= {p.lifetime_high_cutoff}",
        )
    return p


@dataclass
class MarketState:
    """Full mutable world state of one realization.

    portfolio[k, j] — units of commodity j held by agent k (non-negative int).
    views[k, j]     — agent k's opinion of commodity j, kept in [1, M].
    wants[k]        — the single commodity agent k currently demands (never k).
    """

    t: int
    portfolio: np.ndarray
    views: np.ndarray
    wants: np.ndarray

    @property
    def n_agents(self) -> int:
        return self.portfolio.shape[0]

    @property
    def n_commodities(self) -> int:
        return self.portfolio.shape[1]

    def copy(self) -> "MarketState":
        return MarketState(self.t, self.portfolio.copy(), self.views.copy(), self.wants.copy())

    def check_invariants(self) -> None:
        """Raise AssertionError on any violated state invariant."""
        n, m = self.portfolio.shape
        assert self.t >= 0
        assert self.portfolio.dtype.kind == "i"
        assert (self.portfolio >= 0).all(), "negative portfolio entry"
        assert (self.views >= 1.0).all() and (self.views <= m).all(), "view out of [1, M]"
        assert self.wants.shape == (n,)
        assert ((self.wants >= 0) & (self.wants < m)).all()
        k = np.arange(n)
        producers = k < m
        assert (self.wants[producers] != k[producers]).all(), "agent wants its own product"


@dataclass
class StrengthRecord:
    """Per-turn macroscopic observables.

    ``strength`` (the full per-commodity vector) is optional: the fast
    engine records only its maximum and argmax, which is all the runner
    persists.
    """

    t: int
    v_max: float
    j_max: int
    strength: Optional[np.ndarray] = None


def init_state(p: Params, stream: RandomStream) -> MarketState:
    """Initial state: one unit of own product each, flat views at 1.

    Initial wants are drawn uniformly over non-self commodities, one draw
    per agent in agent order (this is the first use of the realization's
    stream).
    """
    n, m = p.n, p.m
    portfolio = np.zeros((n, m), dtype=np.int64)
    for k in range(min(n, m)):
        portfolio[k, k] = 1
    views = np.ones((n, m), dtype=np.float64)
    wants = np.empty(n, dtype=np.int64)
    for k in range(n):
        # agents beyond M have no own product to avoid (only arises when N > M)
        wants[k] = stream.randint_skip(m, k) if k < m else stream.randint(m)
    return MarketState(t=0, portfolio=portfolio, views=views, wants=wants)
