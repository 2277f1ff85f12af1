"""Seeded random source: splitmix64 seeding of xoshiro256**.

Every random draw in the package flows from one of these generators so that
witnesses are reproducible from the seed alone.
"""
import math

import numpy as np

_MASK = (1 << 64) - 1
DEFAULT_SEED = 0xE77EC7


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


def splitmix64(state):
    """Return ``(next_state, output)`` of one splitmix64 step."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** with the reference splitmix64 seeding."""

    def __init__(self, seed=DEFAULT_SEED):
        state = int(seed) & _MASK
        s = []
        for _ in range(4):
            state, out = splitmix64(state)
            s.append(out)
        self._s = s
        self._spare = None

    def next_u64(self):
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self, low=0.0, high=1.0):
        """Double in [low, high) from the top 53 bits."""
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return low + (high - low) * u

    def integer(self, n):
        """Uniform integer in range(n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def choice(self, seq):
        return seq[self.integer(len(seq))]

    def normal(self):
        """Standard normal via Box-Muller (the spare value is cached)."""
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()  # in (0, 1]
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normals(self, shape):
        n = int(np.prod(shape))
        return np.array([self.normal() for _ in range(n)]).reshape(shape)

    def ginibre(self, rows, cols):
        """Complex Gaussian matrix with E|g_ij|^2 = 1."""
        re = self.normals((rows, cols))
        im = self.normals((rows, cols))
        return (re + 1j * im) / math.sqrt(2.0)

    def spawn(self):
        """Independent child generator seeded from this stream."""
        return Xoshiro256(self.next_u64())


def as_rng(seed_or_rng):
    if isinstance(seed_or_rng, Xoshiro256):
        return seed_or_rng
    if seed_or_rng is None:
        return Xoshiro256(DEFAULT_SEED)
    return Xoshiro256(seed_or_rng)
