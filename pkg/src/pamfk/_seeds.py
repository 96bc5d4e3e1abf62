"""Deterministic seed derivation for per-site and per-walk RNG streams."""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix64(*values: int) -> int:
    """Mix any number of integers into one well-scrambled 64-bit seed.

    Order-sensitive, so (seed, 1, 0) and (seed, 0, 1) give distinct streams.
    """
    h = 0x243F6A8885A308D3
    for v in values:
        h = _splitmix64((h ^ (v & _MASK)) & _MASK)
    return h


def site_seed(master_seed: int, site: tuple[int, ...]) -> int:
    """Seed for the noise path at a lattice site.

    Depends only on (master_seed, coordinates), never on the order in
    which sites were first touched.
    """
    # shift negative coordinates into the unsigned domain before mixing
    return mix64(master_seed, len(site), *((c & _MASK) for c in site))
