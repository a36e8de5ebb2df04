"""Deterministic random number generation.

Document regeneration has to be byte-stable across runs and independent of any
library's private RNG internals, so the generator is pinned here explicitly:

* uniform 64-bit stream: splitmix64 (Steele, Lea, Vigna; public domain,
  https://prng.di.unimi.it/splitmix64.c). It is counter-based: the k-th output
  is ``mix64(seed + (k+1)*GAMMA) mod 2^64``, which lets bulk draws be computed
  as a vectorized pure function of the draw index.
* normal deviates: Box-Muller on consecutive uint64 pairs. For the pair
  ``(x1, x2)``:

      u1 = ((x1 >> 11) + 1) * 2^-53        in (0, 1], so log(u1) is finite
      u2 = (x2 >> 11) * 2^-53              in [0, 1)
      z0 = sqrt(-2 ln u1) * cos(2 pi u2)   returned first
      z1 = sqrt(-2 ln u1) * sin(2 pi u2)   returned second

Normals are always evaluated in fixed blocks of 128 pairs, whatever mix of
single and bulk requests arrives, so the value of draw ``i`` depends only on
``(seed, i)`` and never on call granularity or SIMD lane boundaries. The stream
is a single sequence: consumers that retry (resampling loops) keep drawing from
where they left off.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractViolation

__all__ = ["RNG_ID", "SplitMix64", "NormalStream"]

RNG_ID = "splitmix64-boxmuller-v1"

_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = 0xFFFFFFFFFFFFFFFF

# normals per evaluation block; must stay fixed or streams change
_BLOCK_PAIRS = 128
_BLOCK_DRAWS = 2 * _BLOCK_PAIRS


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ContractViolation(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ContractViolation(f"seed must fit in uint64, got {seed}")
    return seed


def _mix64_array(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Raw uint64 stream. Draw k is a pure function of (seed, k)."""

    def __init__(self, seed: int):
        self._seed = _check_seed(seed)
        self._count = 0

    @property
    def draws(self) -> int:
        """Number of uint64 values consumed so far."""
        return self._count

    def next_uint64(self) -> int:
        z = (self._seed + (self._count + 1) * _GAMMA) & _MASK64
        self._count += 1
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def uint64s(self, count: int) -> np.ndarray:
        """Vectorized draw of `count` values; bit-identical to the scalar path."""
        if count < 0:
            raise ContractViolation("count must be nonnegative")
        idx = np.arange(self._count + 1, self._count + count + 1, dtype=np.uint64)
        self._count += count
        with np.errstate(over="ignore"):
            state = np.uint64(self._seed) + idx * np.uint64(_GAMMA)
        return _mix64_array(state)

    def integers(self, count: int, bound: int) -> np.ndarray:
        """`count` integers uniform in [0, bound) via modulo reduction.

        Modulo bias is at most bound/2^64, far below any sampling-diagnostic
        concern for the index ranges used here.
        """
        if bound <= 0:
            raise ContractViolation("bound must be positive")
        return (self.uint64s(count) % np.uint64(bound)).astype(np.int64)


class NormalStream:
    """Standard-normal stream with a deterministic, call-pattern-free order."""

    def __init__(self, seed: int):
        self._seed = _check_seed(seed)
        self._next_block = 0
        self._buffer = np.empty(0)

    def _compute_block(self, block: int) -> np.ndarray:
        start = block * _BLOCK_DRAWS
        idx = np.arange(start + 1, start + _BLOCK_DRAWS + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            state = np.uint64(self._seed) + idx * np.uint64(_GAMMA)
        hi = _mix64_array(state) >> np.uint64(11)
        u1 = (hi[0::2] + np.uint64(1)) * 2.0**-53
        u2 = hi[1::2] * 2.0**-53
        radius = np.sqrt(-2.0 * np.log(u1))
        theta = (2.0 * math.pi) * u2
        out = np.empty(_BLOCK_DRAWS)
        out[0::2] = radius * np.cos(theta)
        out[1::2] = radius * np.sin(theta)
        return out

    def normals(self, count: int) -> np.ndarray:
        """Next `count` normal deviates as a float64 array."""
        if count < 0:
            raise ContractViolation("count must be nonnegative")
        parts = []
        have = self._buffer.size
        if have:
            take = min(have, count)
            parts.append(self._buffer[:take])
            self._buffer = self._buffer[take:]
        got = sum(p.size for p in parts)
        while got < count:
            block = self._compute_block(self._next_block)
            self._next_block += 1
            take = min(block.size, count - got)
            parts.append(block[:take])
            got += take
            if take < block.size:
                self._buffer = block[take:]
        if not parts:
            return np.empty(0)
        return np.concatenate(parts) if len(parts) > 1 else parts[0].copy()

    def next_normal(self) -> float:
        return float(self.normals(1)[0])
