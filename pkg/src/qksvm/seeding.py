"""Deterministic seed derivation.

All randomness in a run flows from one master seed. Each consumer gets its
own stream by mixing the master seed with a fixed stream tag through
numpy's ``SeedSequence`` hash, so adding a consumer never shifts another.
"""

import numpy as np

STREAM_OVERSAMPLE = 0
STREAM_SPLIT = 1
STREAM_CV = 2
STREAM_SHOTS = 3


def derive_seed(*parts: int) -> int:
    """Mix non-negative integers into one 63-bit seed."""
    entropy = [int(p) & 0xFFFFFFFFFFFFFFFF for p in parts]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


def stream_seed(master_seed: int, stream: int) -> int:
    return derive_seed(master_seed, 0xC0FFEE, stream)


def pair_seed(master_seed: int, i: int, j: int) -> int:
    """Seed for the symmetric pair {i, j}; independent of argument order."""
    a, b = (i, j) if i <= j else (j, i)
    return derive_seed(master_seed, 0x9A17, a, b)


def cross_seed(master_seed: int, row: int, col: int) -> int:
    """Seed for an (evaluation row, training column) entry of a cross-kernel."""
    return derive_seed(master_seed, 0xC505, row, col)
