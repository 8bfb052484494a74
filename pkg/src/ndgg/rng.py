"""Named, seedable random streams.

Every stochastic choice in the package (weight init, dropout masks,
synthetic data) draws from a stream derived from a single integer seed
plus a name path, so one seed fully determines a run and independent
concerns never share state.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _name_entropy(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def stream(seed: int, *names: str) -> np.random.Generator:
    """Return a generator for the stream addressed by (seed, *names).

    The same (seed, names) pair always yields an identical stream, on
    any platform; distinct name paths yield statistically independent
    streams.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_name_entropy(n) for n in names]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
