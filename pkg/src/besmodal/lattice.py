"""Zeta-style transforms over the boolean lattice of bases.

A base over a universe of ``n`` rules is identified with its member bitmask,
so a vector indexed by ``0 .. 2**n - 1`` assigns a value to every base. All
transforms accept arrays whose first axis is the lattice axis; trailing axes
(e.g. the target axis of a relation matrix) are carried along.
"""

from __future__ import annotations

import numpy as np


def _split(v: np.ndarray, n: int, i: int) -> np.ndarray:
    # axis 1 of the view is bit i of the lattice index
    return v.reshape((1 << (n - 1 - i), 2, 1 << i) + v.shape[1:])


def sup_all(v: np.ndarray, n: int) -> np.ndarray:
    """``out[b] = all(v[c] for c ⊇ b)``."""
    out = v.copy()
    for i in range(n):
        w = _split(out, n, i)
        w[:, 0] &= w[:, 1]
    return out


def sup_any(v: np.ndarray, n: int) -> np.ndarray:
    """``out[b] = any(v[c] for c ⊇ b)``."""
    out = v.copy()
    for i in range(n):
        w = _split(out, n, i)
        w[:, 0] |= w[:, 1]
    return out


def sub_all(v: np.ndarray, n: int) -> np.ndarray:
    """``out[b] = all(v[c] for c ⊆ b)``."""
    out = v.copy()
    for i in range(n):
        w = _split(out, n, i)
        w[:, 1] &= w[:, 0]
    return out


def sub_any(v: np.ndarray, n: int) -> np.ndarray:
    """``out[b] = any(v[c] for c ⊆ b)``."""
    out = v.copy()
    for i in range(n):
        w = _split(out, n, i)
        w[:, 1] |= w[:, 0]
    return out


def proper_sup_any(v: np.ndarray, n: int) -> np.ndarray:
    """``out[b] = any(v[c] for c ⊋ b)``."""
    ex = sup_any(v, n)
    out = np.zeros_like(v)
    for i in range(n):
        w_out = _split(out, n, i)
        w_ex = _split(ex, n, i)
        w_out[:, 0] |= w_ex[:, 1]
    return out


def drop_bit_all(v: np.ndarray, n: int) -> np.ndarray:
    """``out[b] = all(v[b - {i}] for i in b)`` (True when b is empty)."""
    out = np.ones_like(v)
    for i in range(n):
        w_out = _split(out, n, i)
        w_v = _split(v, n, i)
        w_out[:, 1] &= w_v[:, 0]
    return out


def subset_mask(size: int, b: int) -> np.ndarray:
    idx = np.arange(size, dtype=np.int64)
    return (idx & ~b) == 0


def superset_mask(size: int, b: int) -> np.ndarray:
    idx = np.arange(size, dtype=np.int64)
    return (idx & b) == b
