"""Deterministic random-stream derivation.

Every randomized routine in the package draws from a generator produced by
:func:`substream`, so that a single master seed plus a fixed integer path
fully determines the outcome and independent sub-tasks never share a stream.
"""

from __future__ import annotations

import numpy as np


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Return a generator keyed by ``master_seed`` and a fixed counter path."""
    if master_seed < 0:
        raise ValueError(f"master_seed must be nonnegative, got {master_seed}")
    entropy = [int(master_seed)] + [int(c) for c in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))
