"""Reference implementation of the in-repo pseudo-random generator.

All sampling engines draw from a 64-bit xorshift register (shifts 13, 7, 17)
so that point clouds are reproducible bit-for-bit across platforms and across
the compiled/pure-python backends, which re-implement the same generator.
Per-walker streams are decorrelated by seeding each register with a
splitmix64 hash of (seed, walker index).

This module is the documented source of truth; the kernels must match it
exactly (see tests/test_kernels.py).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 scrambling round of a 64-bit value."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def xorshift64(state: int) -> int:
    """Advance the shift register by one step; state must be nonzero."""
    state &= MASK64
    state ^= (state << 13) & MASK64
    state ^= state >> 7
    state ^= (state << 17) & MASK64
    return state & MASK64


def walker_seed(seed: int, index: int) -> int:
    """Initial register state for walker `index` of run seed `seed`.

    Never returns zero (the xorshift register's fixed point).
    """
    s = splitmix64((seed + index * _GOLDEN) & MASK64)
    return s if s != 0 else _GOLDEN


def uniform01(state: int) -> float:
    """Map a register state to [0, 1) using the top 53 bits."""
    return (state >> 11) * (1.0 / (1 << 53))
