"""Deterministic pseudorandom primitives used by synth and selection.

The generator is SplitMix64 (Vigna, 2015), chosen because it is fully
specified by three 64-bit constants and trivially portable:

    state   <- (state + 0x9E3779B97F4A7C15) mod 2^64        # golden gamma
    z       <- state
    z       <- ((z xor (z >> 30)) * 0xBF58476D1E4B87F9) mod 2^64
    z       <- ((z xor (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output  <- z xor (z >> 31)

Uniform doubles in [0, 1) take the top 53 bits: (output >> 11) * 2^-53.

Normal deviates use the Box-Muller transform on uniform pairs (u1, u2):

    r  = sqrt(-2 ln(1 - u1))          # 1 - u1 in (0, 1] avoids log(0)
    z0 = r * cos(2 pi u2)
    z1 = r * sin(2 pi u2)

pairs are consumed in stream order and interleaved (z0, z1, z0, z1, ...).
Outputs agree between the scalar sampler and the vectorized stream because
the i-th raw output is mix(seed + i * gamma), which both paths compute.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1E4B87F9
_MIX2 = 0x94D049BB133111EB

_TWO_NEG53 = 2.0 ** -53


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Scalar SplitMix64 sampler with rejection-based integer draws."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _TWO_NEG53

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) via modulo rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        while True:
            x = self.next_u64()
            r = x % bound
            if x - r <= _MASK - bound + 1:
                return r

    def sample_without_replacement(self, population: int, count: int) -> list[int]:
        """Draw `count` distinct indices from range(population).

        Partial Fisher-Yates: only the first `count` slots are shuffled.
        """
        if count > population:
            raise ValueError("count exceeds population size")
        items = list(range(population))
        for i in range(count):
            j = i + self.below(population - i)
            items[i], items[j] = items[j], items[i]
        return items[:count]


def u64_stream(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Raw outputs `start .. start+count-1` for `seed` (0-based positions).

    The i-th output (1-based) is mix(seed + i*gamma), so any slice of the
    stream vectorizes; uint64 arithmetic wraps mod 2^64 exactly as the
    scalar path does.
    """
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK) + idx * np.uint64(_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Vector of uniform doubles in [0, 1)."""
    return (u64_stream(seed, count, start) >> np.uint64(11)) * _TWO_NEG53


class RandomStream:
    """Sequential block access to one seed's stream (uniforms and normals).

    Normal blocks consume whole Box-Muller pairs, so an odd-sized block
    advances the stream by one extra raw output.
    """

    def __init__(self, seed: int):
        self._seed = seed
        self._pos = 0

    def uniforms(self, count: int) -> np.ndarray:
        out = uniforms(self._seed, count, self._pos)
        self._pos += count
        return out

    def normals(self, count: int) -> np.ndarray:
        if count == 0:
            return np.zeros(0)
        pairs = (count + 1) // 2
        u = self.uniforms(2 * pairs)
        u1 = 1.0 - u[0::2]
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        return out[:count]


def normals(seed: int, count: int) -> np.ndarray:
    """Vector of standard normal deviates via Box-Muller (see module doc)."""
    return RandomStream(seed).normals(count)
