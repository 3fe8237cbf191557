"""Seed splitting.

Every random stream is addressed by ``(seed, *key)`` and built from
``numpy.random.SeedSequence(seed, spawn_key=key)``. String key parts are
mapped to integers with CRC32 so the rule is reproducible anywhere.

Streams used in the package:

* ``(chain_seed, "warmup")`` and ``(chain_seed, "sample", j)`` drive the
  Hit-and-Run chain; sample ``j`` only depends on sample ``j - 1``.
* ``derive(seed, "dir", p)`` etc. give per-partition chain seeds.
* ``(seed, "probes", p)`` draws cube probes.
"""
from __future__ import annotations

import zlib

import numpy as np

DEFAULT_SEED = 0xDA7A


def _part(k) -> int:
    if isinstance(k, str):
        return zlib.crc32(k.encode())
    k = int(k)
    if k < 0:
        raise ValueError("seed key parts must be non-negative")
    return k


def seed_sequence(seed: int, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(_part(k) for k in key))


def rng_for(seed: int, *key) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *key)))


def derive(seed: int, *key) -> int:
    """A 64-bit child seed."""
    return int(seed_sequence(seed, *key).generate_state(1, np.uint64)[0])
