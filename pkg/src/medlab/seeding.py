"""Deterministic seed derivation.

All randomness flows from a single master seed. Child seeds for parallel or
sequenced tasks are derived with a SplitMix64 mix of (seed, task index), so
any task's stream is reproducible in isolation and independent of scheduling.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    """Derive the ``index``-th child of ``seed`` (SplitMix64 stream)."""
    return _mix((int(seed) + (int(index) + 1) * _GOLDEN) & _MASK)


def task_seed(seed: int, *indices: int) -> int:
    """Derive a child seed along a path of task indices, e.g. (m, dim, retry)."""
    s = int(seed)
    for idx in indices:
        s = child_seed(s, idx)
    return s
