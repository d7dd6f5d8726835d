"""Pure-numpy batch kernels: hashing, counter updates, and queries.

Mirrors the API of the compiled extension ``kmatrix._kernels``; one of the
two is picked at import time by ``kmatrix.kernels``.

All hashing is affine-modular over the Mersenne prime 2^61 - 1.  The
products a*key do not fit in 64 bits, so multiplication is done in 32-bit
halves and folded using 2^61 = 1 (mod p).
"""

import numpy as np

BACKEND = "python"

PRIME = (1 << 61) - 1

_P = np.uint64(PRIME)
_U32_MAX = np.uint64(0xFFFFFFFF)
_MASK32 = np.uint64(0xFFFFFFFF)
_MASK29 = np.uint64((1 << 29) - 1)


def _fold61(s):
    """Reduce values < 2^63 modulo 2^61 - 1."""
    s = (s & _P) + (s >> np.uint64(61))
    s = (s & _P) + (s >> np.uint64(61))
    return np.where(s >= _P, s - _P, s)


def _mulmod(a, k):
    """(a * k) mod (2^61 - 1) for uint64 operands below the prime."""
    a1 = a >> np.uint64(32)
    a0 = a & _MASK32
    k1 = k >> np.uint64(32)
    k0 = k & _MASK32
    hi = a1 * k1                 # < 2^58
    mid = a1 * k0 + a0 * k1      # < 2^62
    lo = a0 * k0                 # full 64 bits, no overflow
    m1 = mid >> np.uint64(29)
    m0 = mid & _MASK29
    s = (
        hi * np.uint64(8)        # 2^64 = 8 (mod p)
        + m1                     # m1 * 2^61 = m1
        + (m0 << np.uint64(32))
        + (lo >> np.uint64(61))
        + (lo & _P)
    )
    return _fold61(s)


def hash_buckets(a, b, w, keys):
    """Bucket indices ((a_r*key + b_r) mod p) mod w, shape (d, n)."""
    keys = np.asarray(keys, dtype=np.uint64)
    out = np.empty((len(a), len(keys)), dtype=np.uint64)
    wv = np.uint64(w)
    for r in range(len(a)):
        h = _fold61(_mulmod(np.uint64(a[r]), keys) + np.uint64(b[r]))
        out[r] = h % wv
    return out


def _saturating_add(row_u32, idx, w):
    inc = np.bincount(idx.astype(np.int64), minlength=w).astype(np.uint64)
    acc = row_u32.astype(np.uint64) + inc
    over = acc > _U32_MAX
    sat = bool(over.any())
    if sat:
        acc[over] = _U32_MAX
    row_u32[:] = acc.astype(np.uint32)
    return sat


def cm_update(counters, a, b, keys):
    """Add one count per key to each row of a (d, w) counter array.

    Returns True if any counter saturated at 2^32 - 1.
    """
    d, w = counters.shape
    buckets = hash_buckets(a, b, w, keys)
    sat = False
    for r in range(d):
        sat |= _saturating_add(counters[r], buckets[r], w)
    return sat


def cm_query(counters, a, b, keys):
    """Row-wise minimum counter per key, shape (n,) uint64."""
    d, w = counters.shape
    buckets = hash_buckets(a, b, w, keys)
    est = np.full(len(np.atleast_1d(np.asarray(keys))), _U32_MAX, dtype=np.uint64)
    for r in range(d):
        est = np.minimum(est, counters[r][buckets[r].astype(np.int64)].astype(np.uint64))
    return est


def mx_update(counters, ar, br, ac, bc, src, dst):
    """Add one count per edge to each layer of a (d, rows, cols) array.

    Row and column coordinates may use distinct hash parameters (pass the
    same arrays twice for the square shared-function layout).
    """
    d, rows, cols = counters.shape
    bi = hash_buckets(ar, br, rows, src)
    bj = hash_buckets(ac, bc, cols, dst)
    sat = False
    for r in range(d):
        flat = counters[r].reshape(-1)
        idx = bi[r] * np.uint64(cols) + bj[r]
        sat |= _saturating_add(flat, idx, rows * cols)
    return sat


def mx_query(counters, ar, br, ac, bc, src, dst):
    """Layer-wise minimum cell per edge, shape (n,) uint64."""
    d, rows, cols = counters.shape
    bi = hash_buckets(ar, br, rows, src)
    bj = hash_buckets(ac, bc, cols, dst)
    n = bi.shape[1]
    est = np.full(n, _U32_MAX, dtype=np.uint64)
    for r in range(d):
        cells = counters[r][bi[r].astype(np.int64), bj[r].astype(np.int64)]
        est = np.minimum(est, cells.astype(np.uint64))
    return est
