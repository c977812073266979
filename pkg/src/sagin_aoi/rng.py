"""Deterministic random-stream derivation.

Every stochastic component of the simulator (packet generation, FSO fading, per-user
RF fading, RANDOM scheduling, RANDOM satellite selection, scenario generation) draws
from its own substream derived from the master seed and a string/int key path. Streams
are independent of draw order elsewhere, so e.g. swapping the scheduling policy never
perturbs the channel realizations of the same seed.
"""
from __future__ import annotations

import hashlib

import numpy as np


def substream(master_seed: int, *key: object) -> np.random.Generator:
    """Generator for the substream identified by ``key`` under ``master_seed``.

    The key path is hashed (sha256) into four 32-bit words appended to the master
    seed's entropy, which keeps the derivation stable across platforms and runs.
    """
    text = "/".join(str(part) for part in key)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, *words]))
