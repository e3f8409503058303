"""Seeded 64-bit PRNG: SplitMix64 seeding a xoshiro256** state.

Pure Python so that a seed gives the same stream on any platform and in
any other implementation of the same two generators.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK


def derive_seed(seed: int, *labels) -> int:
    """Independent 64-bit seed for a named sub-stream of ``seed``."""
    h = hashlib.sha256(str(int(seed) & MASK).encode())
    for lab in labels:
        h.update(b"/" + str(lab).encode())
    return int.from_bytes(h.digest()[:8], "little")


class Xoshiro256:
    def __init__(self, seed: int = 0):
        if seed < 0 or seed > MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        st = int(seed)
        s = []
        for _ in range(4):
            st, out = splitmix64(st)
            s.append(out)
        self._s = s

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """Double in ``[0, 1)`` from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def integers(self, lo: int, hi: int) -> int:
        """Integer in ``[lo, hi]`` inclusive."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + int(self.uniform() * (hi - lo + 1))

    def choice(self, seq):
        return seq[self.integers(0, len(seq) - 1)]

    def _gauss_pair(self) -> tuple[float, float]:
        u1 = 1.0 - self.uniform()  # (0, 1], keeps log finite
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)

    def normal(self, shape=()) -> np.ndarray | float:
        n = int(np.prod(shape)) if shape != () else 1
        vals = []
        while len(vals) < n:
            vals.extend(self._gauss_pair())
        if shape == ():
            return vals[0]
        return np.array(vals[:n]).reshape(shape)

    def complex_normal(self, shape=()) -> np.ndarray | complex:
        """Standard complex Gaussian, ``E|z|^2 = 1``; one Box-Muller pair per entry."""
        n = int(np.prod(shape)) if shape != () else 1
        out = np.empty(n, dtype=np.complex128)
        c = 1.0 / math.sqrt(2.0)
        for k in range(n):
            re, im = self._gauss_pair()
            out[k] = complex(re * c, im * c)
        if shape == ():
            return complex(out[0])
        return out.reshape(shape)

    def uniform_array(self, shape, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        n = int(np.prod(shape))
        return np.array([lo + (hi - lo) * self.uniform() for _ in range(n)]).reshape(shape)
