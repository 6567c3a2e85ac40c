"""SplitMix64, the deterministic random stream behind every generator.

The stdlib ``random.Random`` only pins its raw ``random()`` stream across
interpreter versions; derived methods (shuffle, randrange) have changed
historically. Replayable witnesses need bit-stable streams, so the whole
generator lives in these few lines: state is one 64-bit word advanced by
the golden-ratio increment, outputs are the standard SplitMix64 mix.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


class SplitMix64:
    """Seedable 64-bit generator with a fixed, documented stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_word(self) -> int:
        """Next raw 64-bit output."""
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            word = self.next_word()
            if word < limit:
                return word % bound

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
