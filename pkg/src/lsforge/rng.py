"""Seeded pseudo-random generator with a fixed, portable algorithm.

Searches draw all randomness from :class:`XorShift64Star` so an outcome is a
pure function of the formula and the seed, independent of Python's own
``random`` module.

Algorithm (fixed; changing it changes every pinned result):

* seeding: ``state = splitmix64(seed mod 2**64)``; a zero state becomes
  ``0x9E3779B97F4A7C15``.
* step: ``x ^= x >> 12; x ^= (x << 25) mod 2**64; x ^= x >> 27``;
  output ``(x * 0x2545F4914F6CDD1D) mod 2**64``.
* ``random()`` uses the top 53 bits of one output.
* ``randrange(n)`` rejects outputs ``>= (2**64 // n) * n`` and returns
  ``output % n``.
"""

from __future__ import annotations

from typing import MutableSequence, Sequence, TypeVar

T = TypeVar("T")

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    __slots__ = ("_state",)

    def __init__(self, seed: int = 0):
        state = splitmix64(seed & MASK64)
        self._state = state or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange() needs n >= 1")
        limit = ((1 << 64) // n) * n
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randbool(self) -> bool:
        return bool(self.next_u64() >> 63)

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.randrange(len(seq))]

    def shuffle(self, seq: MutableSequence) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def sample(self, seq: Sequence[T], k: int) -> list[T]:
        """``k`` distinct elements of ``seq`` (partial Fisher-Yates)."""
        pool = list(seq)
        k = min(k, len(pool))
        for i in range(k):
            j = i + self.randrange(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def getstate(self) -> int:
        return self._state
