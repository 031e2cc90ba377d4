"""Deterministic random streams.

All randomness in the package flows through counter-based Philox
generators keyed by (seed, stream index...), so Monte Carlo trials are
reproducible across platforms and independent of scheduling order.
Gaussian variates use numpy's ziggurat sampler on top of that stream.
"""

from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "philox4x64+ziggurat"


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream of ``seed`` addressed by ``key``."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def trial_seeds(master_seed: int, count: int) -> np.ndarray:
    """Per-trial integer seeds derived from one master seed."""
    return np.random.SeedSequence(entropy=int(master_seed)).generate_state(count).astype(np.int64)
