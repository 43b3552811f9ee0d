"""Seeded random-number streams.

All randomness in the package flows through Philox, a counter-based bit
generator, so that independent substreams can be derived from one user
seed without coordination.  A stream is addressed by the user seed plus
an integer key path; identical (seed, key) pairs always yield the same
generator state.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError


def make_generator(seed: int, *key: int) -> np.random.Generator:
    """Return a fresh generator for the substream addressed by ``key``.

    Distinct key paths under the same seed give statistically independent
    streams; the same path always reproduces the same stream.
    """
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *key: int) -> int:
    """Derive an integer seed for the substream addressed by ``key``.

    Useful when an API takes a plain integer seed but the caller needs
    several independent reproducible streams under one user seed.
    """
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(2, np.uint64)[0])
