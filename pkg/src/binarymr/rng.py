"""Seed-derived random-number substreams for reproducible Monte Carlo work.

Every replicate gets its own generator (or integer seed) derived from a
single master seed, so results do not depend on evaluation order and are
identical whether replicates run serially or in parallel.
"""

from __future__ import annotations

import numpy as np


def substream_seeds(seed: int, n: int) -> np.ndarray:
    """Derive ``n`` independent 64-bit integer seeds from a master seed."""
    return np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)


def substream_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Derive ``n`` independent generators from a master seed."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(n)]
