"""Deterministic named PRNG substreams from a single 64-bit seed."""
from __future__ import annotations

import hashlib
import random


def substream(seed: int, name: str) -> random.Random:
    """Independent replayable stream keyed by (seed, name)."""
    digest = hashlib.sha256(f"{seed & 0xFFFFFFFFFFFFFFFF}:{name}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))
