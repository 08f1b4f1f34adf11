"""Deterministic random-number plumbing.

All stochastic code in the package draws from numpy's Philox counter-based
bit generator, which has a published algorithm and produces identical streams
on every platform for a given key.  Sub-streams (per trajectory, per pair,
per channel) are keyed by `derive_seed`, a splitmix64 hash of the master seed
and the index path, so concurrent generation never shares a stream.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Stable 64-bit sub-seed for (master, index path).

    Derivation: fold each index into the state with splitmix64.  Documented so
    that independently written callers can reproduce any sub-stream.
    """
    state = _splitmix64(master & _MASK)
    for idx in indices:
        state = _splitmix64(state ^ ((idx + 1) & _MASK))
    return state


def generator(seed: int) -> np.random.Generator:
    """Philox-backed generator keyed directly by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK))
