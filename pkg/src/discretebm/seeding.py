"""Counter-based derivation of random streams from one 64-bit seed.

Stream ``j`` of master seed ``s`` is an independent ``random.Random``
seeded with a mixed 64-bit value, so any instance of a batch can be
regenerated in isolation and parallel runs reproduce serial output
bit for bit.
"""

from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(seed: int, counter: int) -> int:
    """SplitMix64-style finalizer of seed advanced by ``counter`` steps."""
    z = (seed + (counter + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def stream(seed: int, counter: int) -> random.Random:
    """Independent deterministic RNG for stream ``counter`` of ``seed``."""
    return random.Random(mix64(seed, counter))
