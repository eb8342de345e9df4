"""Deterministic child seeds for parallel chains."""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    # splitmix64 finaliser, a bijection on 64-bit words
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def seed_stream(master_seed: int, stream_id: int) -> int:
    """Child seed for ``stream_id``.

    Distinct ids below 2^64 give distinct children for a fixed master, since
    both the counter step and the finaliser are bijective.
    """
    if master_seed < 0 or stream_id < 0:
        raise ValueError("seeds and stream ids must be non-negative")
    key = _mix(master_seed & MASK64)
    return _mix((key + (stream_id + 1) * GOLDEN) & MASK64)
