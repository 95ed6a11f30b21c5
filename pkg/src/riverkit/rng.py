"""Deterministic pseudo-random numbers built on the SplitMix64 finalizer.

All stochastic behaviour in the toolkit (synthetic band noise, sweep
offsets, split shuffles) goes through this generator so that re-runs with
the same seed are bit-identical regardless of platform or numpy version.
"""

from __future__ import annotations

import math

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _mix_array(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output function over a uint64 array (wrapping arithmetic)."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _mix_scalar(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fold_key(key) -> int:
    """FNV-1a over the key's UTF-8 bytes; ints pass through."""
    if isinstance(key, int):
        return key & _MASK
    acc = 0xCBF29CE484222325
    for b in str(key).encode("utf-8"):
        acc = ((acc ^ b) * 0x100000001B3) & _MASK
    return acc


class SplitMix64:
    """Counter-based SplitMix64 stream.

    Output ``i`` of a stream seeded with ``s`` is ``mix(s + (i+1)*GOLDEN)``,
    so draws can be produced in bulk with vectorized uint64 arithmetic.
    """

    def __init__(self, seed: int):
        self._seed = seed & _MASK
        self._count = 0

    def spawn(self, key) -> "SplitMix64":
        """Derive an independent child stream keyed by ``key``."""
        return SplitMix64(_mix_scalar(self._seed ^ _mix_scalar(_fold_key(key) + _GOLDEN)))

    def next_uint64(self, n: int) -> np.ndarray:
        idx = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            state = np.uint64(self._seed) + idx * np.uint64(_GOLDEN)
            return _mix_array(state)

    def uniforms(self, n: int) -> np.ndarray:
        """n float64 samples in [0, 1)."""
        return (self.next_uint64(n) >> np.uint64(11)).astype(np.float64) * (2.0**-53)

    def normals(self, n: int) -> np.ndarray:
        """n standard normal samples via Box-Muller."""
        pairs = (n + 1) // 2
        u1 = self.uniforms(pairs)
        u2 = self.uniforms(pairs)
        u1 = np.maximum(u1, 2.0**-53)  # keep log finite
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        n = len(items)
        if n < 2:
            return
        u = self.uniforms(n - 1)
        for i in range(n - 1, 0, -1):
            j = int(u[n - 1 - i] * (i + 1))
            items[i], items[j] = items[j], items[i]
