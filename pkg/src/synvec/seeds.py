"""Sub-seed derivation.

Every random decision in the toolkit flows from one top-level integer seed.
Components derive their own seeds by hashing (seed, component label, index),
so results do not depend on the order in which components consume randomness
and per-sentence / per-epoch work can be parallelised without changing the
output.
"""

import hashlib

import numpy as np


def derive_seed(seed: int, label: str, index: int = 0) -> int:
    """Derive a child seed from ``seed`` for the component named ``label``.

    The same (seed, label, index) triple always yields the same child seed.
    """
    digest = hashlib.sha256(f"{seed}:{label}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def derived_rng(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """A numpy Generator seeded with :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(seed, label, index))
