"""Seeded random streams.

Every random draw in the package comes from a Philox (counter-based) generator
keyed by ``(master_seed, purpose tag, index)``. Two streams with different keys
never share draws, so trials can run in any order or on any number of workers
and still produce the same numbers.
"""

from __future__ import annotations

import zlib

import numpy as np


def tag_id(tag: str) -> int:
    """Stable 32-bit id of a purpose tag (CRC32, identical across platforms)."""
    return zlib.crc32(tag.encode("utf-8")) & 0xFFFFFFFF


def stream(seed: int, tag: str = "", index: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, tag, index)``.

    Gaussian draws use numpy's ``standard_normal`` (ziggurat) on top of the
    Philox stream; both are fixed algorithms, so outputs are bit-identical
    across platforms for a given key.
    """
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), tag_id(tag), int(index)])
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed_or_rng) -> np.random.Generator:
    """Accept an int seed or an existing Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return stream(int(seed_or_rng))
