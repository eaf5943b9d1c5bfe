"""Seeded random streams.

All randomness in the package flows from a 64-bit seed through
counter-based Philox generators, so runs are reproducible and parallel
chunks can use disjoint streams keyed by (seed, stream).
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, stream]))
