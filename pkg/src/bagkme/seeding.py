"""Deterministic seed derivation for nested experiment coordinates."""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, *coords: int) -> int:
    """Derive a child seed from a master seed and integer coordinates.

    Uses numpy's SeedSequence hashing, so children for distinct coordinate
    tuples are statistically independent and the mapping is stable across
    runs, platforms and thread counts.
    """
    entropy = [int(master) & _MASK64] + [int(c) & _MASK64 for c in coords]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])
