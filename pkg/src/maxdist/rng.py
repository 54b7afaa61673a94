"""Seeded, splittable random streams.

Every random draw in the package comes from a ``numpy.random.Generator``
passed in explicitly. Streams are Philox (counter-based) generators whose
keys are derived from a 64-bit seed plus an integer path, so replication
``k`` of an experiment sees the same numbers no matter how many workers
run the experiment or in which order.
"""

from __future__ import annotations

import numpy as np

SEED_MASK = (1 << 64) - 1


def make_stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for ``(seed, *path)``.

    ``path`` identifies a substream, e.g. ``(experiment_tag, n_index, rep)``.
    """
    if seed < 0 or seed > SEED_MASK:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def as_stream(rng) -> np.random.Generator:
    """Accept a Generator or an integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, (int, np.integer)):
        return make_stream(int(rng))
    raise TypeError(f"expected a numpy Generator or an int seed, got {type(rng).__name__}")
