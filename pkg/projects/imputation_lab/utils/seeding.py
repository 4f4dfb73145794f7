"""Seed derivation shared by every random component."""

import zlib

import numpy as np


def _key_to_int(key: int | str) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key)


def derive_seed(base: int, *keys: int | str) -> int:
    """Derive a child seed from a base seed and a path of keys.

    String keys are hashed with CRC32 so the result is stable across
    interpreter runs.

    Args:
        base: Root seed.
        *keys: Integers or strings identifying the consumer (e.g. "mice", chain index).

    Returns:
        int: A 32-bit seed.
    """
    entropy = [int(base) & 0xFFFFFFFF, *(_key_to_int(k) & 0xFFFFFFFF for k in keys)]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def make_rng(base: int, *keys: int | str) -> np.random.Generator:
    """Build a numpy Generator seeded by derive_seed(base, *keys)."""
    return np.random.default_rng(derive_seed(base, *keys))
