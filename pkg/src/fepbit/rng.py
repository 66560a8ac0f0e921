"""Deterministic random streams.

Every stream is addressed by a master seed plus a tuple of integer keys
(trajectory index, domain index, ...). Streams are independent of the order
in which they are created, so runs reproduce regardless of parallelism.
"""
from __future__ import annotations

import zlib

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def name_key(name: str) -> int:
    """Stable integer key for a string label (experiment names etc.)."""
    return zlib.crc32(name.encode("utf-8"))
