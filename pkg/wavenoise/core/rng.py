# wavenoise/core/rng.py
"""
Pinned pseudo-random number generation.

xoshiro256** with its four state words taken from the first four outputs of
splitmix64 started at the seed, which is the reference seeding of the
algorithm. Integer arithmetic is exact modulo 2**64, so the uint64 and uniform
streams are identical on every platform for a given seed.
"""
import math

import numpy as np

MASK64 = (1 << 64) - 1

_GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_DOUBLE_UNIT = 1.0 / float(1 << 53)


def _u(value: int) -> np.uint64:
    return np.uint64(value)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First `count` outputs of splitmix64 started at `seed`"""
    state = np.arange(1, count + 1, dtype=np.uint64) * _GOLDEN_GAMMA + _u(seed & MASK64)
    z = state
    z = (z ^ (z >> _u(30))) * _MIX1
    z = (z ^ (z >> _u(27))) * _MIX2
    return z ^ (z >> _u(31))


def derive_seed(seed: int, *salt: int) -> int:
    """Deterministic child seed for a sub-stream (component index, series index, ...)"""
    value = seed & MASK64
    for s in salt:
        value = int(splitmix64(value ^ ((s + 1) * 0x9E3779B97F4A7C15 & MASK64), 1)[0])
    return value


class Xoshiro256StarStar:
    """xoshiro256** generator producing the reference output sequence"""

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._state = tuple(int(word) for word in splitmix64(self.seed, 4))

    def next_uint64(self, n: int) -> np.ndarray:
        """n raw 64-bit outputs"""
        if n <= 0:
            return np.empty(0, dtype=np.uint64)
        s0, s1, s2, s3 = self._state
        out = [0] * n
        for i in range(n):
            r = (s1 * 5) & MASK64
            out[i] = ((((r << 7) | (r >> 57)) & MASK64) * 9) & MASK64
            t = (s1 << 17) & MASK64
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self._state = (s0, s1, s2, s3)
        return np.array(out, dtype=np.uint64)

    def uniform(self, n: int) -> np.ndarray:
        """n doubles on [0, 1) built from the top 53 bits"""
        bits = self.next_uint64(n) >> _u(11)
        return bits.astype(np.float64) * _DOUBLE_UNIT

    def standard_normal(self, n: int) -> np.ndarray:
        """n standard normal deviates (Box-Muller on pinned uniforms)"""
        if n <= 0:
            return np.empty(0, dtype=np.float64)
        half = math.ceil(n / 2)
        u1 = 1.0 - self.uniform(half)  # (0, 1]
        u2 = self.uniform(half)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * half, dtype=np.float64)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:n]
