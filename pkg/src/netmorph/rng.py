"""Named, reproducible random streams derived from a single integer seed.

Every consumer (growth, sampling, walks, mutation, baseline ...) gets its own
``numpy.random.Generator`` keyed by name, so adding or reordering consumers
never perturbs the others.
"""

from __future__ import annotations

import zlib

import numpy as np

STREAM_NAMES = ("growth", "sampling", "walks", "mutation", "baseline", "gensim")


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def stream(seed: int, name: str, *path: int) -> np.random.Generator:
    """Return the generator for sub-stream ``name`` (optionally indexed by ``path``)."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_name_key(name), *map(int, path)))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit seed from ``rng`` for handing to an independent process."""
    return int(rng.integers(0, 2**63 - 1))
