"""Pinned pseudo-random generator used for every stochastic input.

xoshiro256** (Blackman & Vigna) seeded through splitmix64. Doubles take
the top 53 bits of a 64-bit output, so a given seed yields the same
sequence on every platform. Gaussian draws use the Box-Muller transform
and depend on the C library's ``log``/``cos``/``sin``; they are
reproducible on a fixed platform, not guaranteed bit-identical across
libm implementations.

    splitmix64:  z = (state += 0x9E3779B97F4A7C15)
                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                 return z ^ (z >> 31)

    xoshiro256**: result = rotl(s1 * 5, 7) * 9
                  t = s1 << 17
                  s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
                  s2 ^= t;  s3 = rotl(s3, 45)
"""

import math

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state):
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(seed, stream):
    """Independent 64-bit seed for sub-stream ``stream`` of ``seed``."""
    state = (seed & MASK64) ^ ((stream * 0xD1B54A32D192ED03) & MASK64)
    _, out = splitmix64(state)
    return out


class Xoshiro256:
    def __init__(self, seed=0):
        state = seed & MASK64
        s = []
        for _ in range(4):
            state, out = splitmix64(state)
            s.append(out)
        self.s = s

    def next_u64(self):
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self):
        """Uniform double in [0, 1) with 53 random mantissa bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def uniform(self, low, high, size):
        u = np.array([self.random() for _ in range(size)], dtype=np.float64)
        return low + (high - low) * u

    def normal(self, size):
        """Standard normal draws via Box-Muller, both outputs of each pair used."""
        out = np.empty(size, dtype=np.float64)
        i = 0
        while i < size:
            u1 = 1.0 - self.random()  # (0, 1], keeps log finite
            u2 = self.random()
            rad = math.sqrt(-2.0 * math.log(u1))
            out[i] = rad * math.cos(2.0 * math.pi * u2)
            if i + 1 < size:
                out[i + 1] = rad * math.sin(2.0 * math.pi * u2)
            i += 2
        return out
