"""SplitMix64: a splittable, counter-based 64-bit generator.

The ``k``-th output for seed ``s`` is ``mix(s + k * GOLDEN)``, so any stream
position is addressable in O(1).  Replicate ``i`` of a batch seeded with
``master`` uses the ``i``-th output of the master stream as its own seed,
which makes batch results independent of execution order.

Constants are those of Steele, Lea & Flood (OOPSLA 2014).
"""
from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL1 = 0xBF58476D1CE4E5B9
MIX_MUL2 = 0x94D049BB133111EB

_GAMMA = np.uint64(GOLDEN_GAMMA)
_M1 = np.uint64(MIX_MUL1)
_M2 = np.uint64(MIX_MUL2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


def mix64_py(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MUL2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed of replicate ``index``: the ``index``-th output of the master stream."""
    if index < 0:
        raise ValueError("replicate index must be nonnegative")
    return mix64_py(master_seed + (index + 1) * GOLDEN_GAMMA)


def derive_seeds(master_seed: int, count: int) -> np.ndarray:
    return np.array([derive_seed(master_seed, i) for i in range(count)], dtype=np.uint64)


class SplitMix64:
    """Reference (pure Python) stream; the compiled kernels must match it draw for draw."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64_py(self.state)

    def random(self) -> float:
        """Uniform double on [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53


@njit(inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(inline="always")
def advance(state):
    return state + _GAMMA


@njit(inline="always")
def to_unit(z):
    # uint64 -> float64 is slow in numba; the 53-bit value fits in int64
    return np.int64(z >> _S11) * _INV53


@njit(nogil=True, cache=True)
def uniforms(seed, count):
    """First ``count`` uniforms of the stream seeded with ``seed``."""
    state = np.uint64(seed)
    out = np.empty(count)
    for i in range(count):
        state = advance(state)
        out[i] = to_unit(mix64(state))
    return out
