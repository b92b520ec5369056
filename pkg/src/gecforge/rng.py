"""Deterministic counter-based randomness.

Site selection and seed derivation must be reproducible across runs, platforms
and worker counts, so all randomness is derived by hashing a key tuple rather
than by consuming shared generator state.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1


def derive(*parts: int | str | bytes) -> int:
    """Derive a 64-bit value from the given key parts.

    Splittable by construction: disjoint key tuples give independent streams.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        if isinstance(part, int):
            data = b"i" + part.to_bytes(16, "little", signed=True)
        elif isinstance(part, str):
            data = b"s" + part.encode("utf-8")
        else:
            data = b"b" + part
        h.update(len(data).to_bytes(4, "little"))
        h.update(data)
    return int.from_bytes(h.digest(), "little") & _MASK64


def choose(n: int, *parts: int | str | bytes) -> int:
    """Uniform index in [0, n) keyed by the given parts."""
    if n <= 0:
        raise ValueError("cannot choose from an empty range")
    return derive(*parts) % n


def uniform(*parts: int | str | bytes) -> float:
    """Uniform float in [0, 1) keyed by the given parts."""
    return derive(*parts) / float(1 << 64)
