"""Deterministic random streams.

All randomness goes through ``numpy.random.Philox``, a counter-based generator.
A stream is identified by the user seed plus an integer key path, so streams for
different samples or purposes never depend on the order they are drawn in.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Purpose tags that keep independent consumers of one seed apart."""

    CLUSTER_DRAW = 1
    NOISE = 2
    LANCZOS = 3
    KMEANS = 4
    EXTRA_NOISE = 5


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Return a Philox generator for ``seed`` and the stream ``key``."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))
