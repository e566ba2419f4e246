"""Deterministic 64-bit PRNG primitives (SplitMix64).

The integer stream is the reproducibility contract of this package: any
implementation seeded with the same 64-bit value must produce the same
u64 sequence bit for bit. Floating-point values derived from the stream
(see cwmark.stats) are only comparable within documented tolerances.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 generator.

    next_u64() advances the state by GOLDEN_GAMMA and returns mix64(state),
    so the j-th output (1-based) equals mix64(seed + j * GOLDEN_GAMMA).
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return mix64(self._state)

    def next_below(self, bound: int) -> int:
        """Uniform draw in [0, bound) by modulo reduction.

        The reduction bias (< bound / 2**64) is accepted; determinism and
        cross-implementation agreement matter more here than perfect
        uniformity.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound


def splitmix64_stream(seed: int, count: int) -> np.ndarray:
    """First `count` outputs of SplitMix64(seed) as a uint64 array.

    Vectorized counter form of the sequential generator; identical to
    calling SplitMix64(seed).next_u64() `count` times.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def u64_to_unit(values: np.ndarray) -> np.ndarray:
    """Map uint64 values to doubles in the half-open interval (0, 1].

    Uses the top 53 bits plus one, so 0.0 can never occur (safe under log).
    """
    return ((values >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def random_bits(seed: int, count: int) -> np.ndarray:
    """`count` uniform bits from SplitMix64(seed), little-endian within words."""
    words = splitmix64_stream(seed, (count + 63) // 64)
    data = np.frombuffer(words.astype("<u8").tobytes(), dtype=np.uint8)
    return np.unpackbits(data, bitorder="little")[:count]
