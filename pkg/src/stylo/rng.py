"""Deterministic 64-bit PRNG used everywhere randomness is needed.

The generator is SplitMix64 (Steele, Lea, Vigna), chosen because it is a
handful of integer operations with published reference outputs, so splits,
bootstraps and weight initializations reproduce bit-for-bit on any platform
or language.  Do not swap in ``random`` or ``numpy.random``: their streams
are implementation details of their libraries.

Derived conventions, all pinned here:

* ``next_uint64``: one SplitMix64 step.
* ``next_below(n)``: unbiased bounded integer via rejection sampling on
  ``x % n`` (redraw while ``x >= 2**64 - (2**64 % n)``).
* ``next_unit``: float in [0, 1) built as ``(x >> 11) * 2.0**-53``.
* ``shuffle``: Fisher-Yates, walking i from len-1 down to 1 with
  ``j = next_below(i + 1)``.
"""

from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n), free of modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_uint64()
            if x < limit:
                return x % n

    def next_unit(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_uint64() >> 11) * 2.0 ** -53

    def next_uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_unit()

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """First k entries of a Fisher-Yates pass over range(n), without replacement."""
        if k > n:
            raise ValueError("k must not exceed n")
        idx = list(range(n))
        # partial shuffle: only the first k positions are needed
        for i in range(k):
            j = i + self.next_below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:k]

    def choice_weighted(self, cumulative: list[float]) -> int:
        """Index into a cumulative weight table (last entry = total weight)."""
        u = self.next_unit() * cumulative[-1]
        lo, hi = 0, len(cumulative) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u < cumulative[mid]:
                hi = mid
            else:
                lo = mid + 1
        return lo


def derive_seed(seed: int, stream: int) -> int:
    """Decorrelated child seed for a numbered substream."""
    return SplitMix64((seed ^ (stream * 0x9E3779B97F4A7C15)) & _MASK64).next_uint64()


def uint64_stream(seed: int, count: int):
    """First ``count`` outputs of SplitMix64(seed), vectorized.

    Exploits the fact that the generator state after i steps is simply
    seed + i*golden (mod 2**64); bit-identical to repeated next_uint64.
    """
    import numpy as np

    with np.errstate(over="ignore"):
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(seed) + steps * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def unit_stream(seed: int, count: int):
    """First ``count`` uniform [0,1) floats of SplitMix64(seed), vectorized."""
    return (uint64_stream(seed, count) >> 11) * 2.0 ** -53
