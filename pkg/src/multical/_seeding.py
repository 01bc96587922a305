"""Seed handling shared by sampling and the Monte Carlo harness.

All randomness goes through ``numpy.random.Generator(PCG64(seed))``.  PCG64
and its SeedSequence initialisation are fixed algorithms in numpy, so a given
64-bit seed yields the same stream on every platform.

Per-trial seeds are derived with SplitMix64 so that trial ``i`` of a run can be
replayed on its own::

    seed_i = splitmix64(master_seed + (i + 1) * 0x9E3779B97F4A7C15  mod 2**64)
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 finalisation step on a 64-bit integer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, index: int) -> int:
    """Seed for trial ``index`` under ``master_seed``."""
    if index < 0:
        raise ValueError("trial index must be nonnegative")
    return splitmix64((master_seed & MASK64) + (index + 1) * GOLDEN_GAMMA)


def make_rng(seed: int) -> np.random.Generator:
    if seed < 0 or seed > MASK64:
        raise ValueError(f"seed must be a u64, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))
