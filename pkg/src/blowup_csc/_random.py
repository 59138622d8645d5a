"""Seeded, counter-based random streams.

Every operation derives its own generator from the run seed plus a tuple of
integer keys, so results never depend on call order.
"""

from __future__ import annotations

import zlib

import numpy as np

DEFAULT_SEED = 20240601


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def rng_for(seed: int, *keys) -> np.random.Generator:
    """Generator for the stream ``(seed, *keys)``; keys may be ints or strings."""
    ss = np.random.SeedSequence(int(seed) % 2**64, spawn_key=tuple(_key(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def sphere_points(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """``count`` uniform points on the unit sphere of C^dim, shape (count, dim)."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
