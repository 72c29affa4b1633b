"""Seedable, splittable 64-bit generator shared by all randomized stages.

The algorithm is SplitMix64: a Weyl sequence with the golden-gamma
increment, finalized by Vigna's 64-bit mixer. All arithmetic wraps
modulo 2**64. The exact integer recurrence, which peer implementations
must reproduce, is:

    state  <- state + 0x9E3779B97F4A7C15
    z      <- state
    z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
    z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB
    output <- z XOR (z >> 31)

Uniform doubles in [0, 1) take the top 53 bits: (output >> 11) * 2**-53.

Because the state after n draws is seed + n*GAMMA (mod 2**64), the n-th
output equals mix64(seed + n*GAMMA); block generation is counter-based
and vectorizes with numpy while producing the exact scalar sequence.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

_MIX_C1 = 0xBF58476D1CE4E5B9
_MIX_C2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """Finalizer applied to the Weyl state; a bijection on 64-bit ints."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_C1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_C2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 stream. Single-owner; draws advance the state in order."""

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self._state = seed

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return mix64(self._state)

    def next_u64_block(self, n: int) -> np.ndarray:
        """n consecutive outputs as uint64; identical to n next_u64() calls."""
        with np.errstate(over="ignore"):
            idx = np.arange(1, n + 1, dtype=np.uint64)
            z = np.uint64(self._state) + idx * np.uint64(GOLDEN_GAMMA)
            z ^= z >> np.uint64(30)
            z *= np.uint64(_MIX_C1)
            z ^= z >> np.uint64(27)
            z *= np.uint64(_MIX_C2)
            z ^= z >> np.uint64(31)
        self._state = (self._state + n * GOLDEN_GAMMA) & MASK64
        return z

    def uniform(self) -> float:
        """One double in [0, 1) from the top 53 bits of the next output."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_block(self, n: int) -> np.ndarray:
        """n doubles in [0, 1); identical to n uniform() calls."""
        return (self.next_u64_block(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def split(self) -> "SplitMix64":
        """Child generator seeded from the next output of this stream."""
        return SplitMix64(self.next_u64())

    def __repr__(self) -> str:
        return f"SplitMix64(state=0x{self._state:016x})"
