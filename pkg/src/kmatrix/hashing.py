"""Seeded families of pairwise-independent hash functions.

Each function is h(x) = ((a*x + b) mod p) mod w with p the Mersenne prime
2^61 - 1 and per-function (a, b) drawn from a seeded generator, so the same
(seed, d, w) always yields the same family, across processes.
"""

import random
from dataclasses import dataclass, field

import numpy as np

from kmatrix.kernels import PRIME, hash_buckets


@dataclass(frozen=True)
class HashFamily:
    """d affine-modular hash functions mapping integer keys into [0, w)."""

    seed: int
    d: int
    w: int
    a: np.ndarray = field(repr=False)  # uint64, a_r != 0
    b: np.ndarray = field(repr=False)  # uint64

    def buckets(self, keys) -> np.ndarray:
        """Bucket indices for a batch of keys, shape (d, n)."""
        return hash_buckets(self.a, self.b, self.w, np.asarray(keys, dtype=np.uint64))


def make_family(seed: int, d: int, w: int) -> HashFamily:
    """Build a deterministic family of d functions with bucket range w."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if w < 1:
        raise ValueError(f"w must be >= 1, got {w}")
    rng = random.Random(seed)
    a = np.empty(d, dtype=np.uint64)
    b = np.empty(d, dtype=np.uint64)
    for r in range(d):
        a[r] = rng.randrange(1, PRIME)
        b[r] = rng.randrange(0, PRIME)
    return HashFamily(seed=seed, d=d, w=w, a=a, b=b)


def bucket(family: HashFamily, r: int, key: int) -> int:
    """Evaluate function r on one key; exact (Python-int) arithmetic."""
    if not 0 <= r < family.d:
        raise IndexError(f"function index {r} out of range for d={family.d}")
    return ((int(family.a[r]) * key + int(family.b[r])) % PRIME) % family.w
