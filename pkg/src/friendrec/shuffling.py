"""Seeded shuffling primitives with a frozen output contract.

Annotated datasets and train/test splits are reproduced from golden files,
so the generator here must never change behavior between versions or
platforms. We therefore avoid ``random`` / ``numpy.random`` (whose streams
are not contractually stable for shuffling) and pin the exact algorithm:

* SplitMix64 as the bit source (Steele et al.'s mixing constants),
* a classic backward Fisher-Yates exchange shuffle,
* swap index drawn as ``next_u64() % (i + 1)`` (modulo draw, no rejection).

Changing any of these invalidates every committed golden file.
"""

from __future__ import annotations

from typing import Iterable, List, TypeVar

_MASK64 = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """Deterministic 64-bit generator seeded from a single integer."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed}")
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Draw an integer in [0, bound) by modulo reduction."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return self.next_u64() % bound


def seeded_shuffle(items: Iterable[T], seed: int) -> List[T]:
    """Return a new list holding ``items`` in seeded pseudo-random order.

    Pure in (items, seed): equal inputs give an identical permutation on
    every platform and release. The input is not modified.
    """
    out = list(items)
    rng = SplitMix64(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def seeded_permutation(n: int, seed: int) -> List[int]:
    """Seeded permutation of ``range(n)``; same stream as seeded_shuffle."""
    return seeded_shuffle(range(n), seed)
