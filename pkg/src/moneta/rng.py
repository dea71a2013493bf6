"""Deterministic, platform-stable random stream (splitmix64).

Every realization owns exactly one stream, seeded from the experiment's
base seed and the realization index via :func:`mix_seed`.  The draw order
is part of the engine contract: given the same seed, the same sequence of
``randint`` calls returns the same values on every platform, which makes
full trajectories bit-reproducible.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM_SALT = 0xD1B54A32D192ED03


def mix64(z: int) -> int:
    """Splitmix64 finalizer: a 64-bit bijective scrambler."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(base_seed: int, realization_index: int) -> int:
    """Derive the stream state for one realization.

    The base seed is scrambled before combining with the index so that
    consecutive indices start from unrelated points of the splitmix64
    sequence (raw ``base + index`` starts would produce overlapping
    streams, since the stream itself advances by a fixed increment).
    """
    return mix64(mix64(base_seed) ^ (((realization_index + 1) * _STREAM_SALT) & _MASK64))


class RandomStream:
    """Splitmix64 generator with an explicit, documented draw order."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK64

    @classmethod
    def for_realization(cls, base_seed: int, realization_index: int) -> "RandomStream":
        return cls(mix_seed(base_seed, realization_index))

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        return mix64(self.state)

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n).

        Plain modulo reduction; the bias for any n used here (n <= M) is
        of order n / 2**64 and irrelevant at simulation scale.
        """
        if n <= 0:
            raise ValueError("randint bound must be positive")
        return self.next_u64() % n

    def randint_skip(self, n: int, skip: int) -> int:
        """Uniform integer in [0, n) excluding ``skip``."""
        r = self.randint(n - 1)
        return r + 1 if r >= skip else r
