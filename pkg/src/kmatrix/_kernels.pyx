# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels: hashing, counter updates, and queries.

Same API as kmatrix._kernels_py; hashing is affine-modular over the
Mersenne prime 2^61 - 1, with the 122-bit product handled in 128 bits.
"""

import numpy as np

from libc.stdint cimport uint32_t, uint64_t

cdef extern from *:
    ctypedef unsigned long long u128 "__uint128_t"

BACKEND = "compiled"

PRIME = (1 << 61) - 1

cdef uint64_t P = (1 << 61) - 1
cdef uint64_t U32_MAX = 0xFFFFFFFF


cdef inline uint64_t _bucket(uint64_t a, uint64_t b, uint64_t w, uint64_t key) noexcept nogil:
    cdef u128 t = (<u128> a) * key + b
    return (<uint64_t> (t % P)) % w


def hash_buckets(a, b, w, keys):
    """Bucket indices ((a_r*key + b_r) mod p) mod w, shape (d, n)."""
    cdef uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef uint64_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint64)
    cdef uint64_t[::1] kv = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t d = av.shape[0], n = kv.shape[0]
    out = np.empty((d, n), dtype=np.uint64)
    cdef uint64_t[:, ::1] ov = out
    cdef uint64_t wv = w
    cdef Py_ssize_t r, i
    with nogil:
        for r in range(d):
            for i in range(n):
                ov[r, i] = _bucket(av[r], bv[r], wv, kv[i])
    return out


def cm_update(uint32_t[:, ::1] counters, a, b, keys):
    """Add one count per key to each row of a (d, w) counter array.

    Returns True if any counter saturated at 2^32 - 1.
    """
    cdef uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef uint64_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint64)
    cdef uint64_t[::1] kv = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t d = counters.shape[0], w = counters.shape[1], n = kv.shape[0]
    cdef Py_ssize_t r, i
    cdef uint64_t bk
    cdef int sat = 0
    with nogil:
        for r in range(d):
            for i in range(n):
                bk = _bucket(av[r], bv[r], <uint64_t> w, kv[i])
                if counters[r, bk] == U32_MAX:
                    sat = 1
                else:
                    counters[r, bk] += 1
    return bool(sat)


def cm_query(uint32_t[:, ::1] counters, a, b, keys):
    """Row-wise minimum counter per key, shape (n,) uint64."""
    cdef uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef uint64_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint64)
    cdef uint64_t[::1] kv = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t d = counters.shape[0], w = counters.shape[1], n = kv.shape[0]
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef Py_ssize_t r, i
    cdef uint64_t est, c
    with nogil:
        for i in range(n):
            est = U32_MAX
            for r in range(d):
                c = counters[r, _bucket(av[r], bv[r], <uint64_t> w, kv[i])]
                if c < est:
                    est = c
            ov[i] = est
    return out


def mx_update(uint32_t[:, :, ::1] counters, ar, br, ac, bc, src, dst):
    """Add one count per edge to each layer of a (d, rows, cols) array.

    Row and column coordinates may use distinct hash parameters (pass the
    same arrays twice for the square shared-function layout).
    """
    cdef uint64_t[::1] arv = np.ascontiguousarray(ar, dtype=np.uint64)
    cdef uint64_t[::1] brv = np.ascontiguousarray(br, dtype=np.uint64)
    cdef uint64_t[::1] acv = np.ascontiguousarray(ac, dtype=np.uint64)
    cdef uint64_t[::1] bcv = np.ascontiguousarray(bc, dtype=np.uint64)
    cdef uint64_t[::1] sv = np.ascontiguousarray(src, dtype=np.uint64)
    cdef uint64_t[::1] dv = np.ascontiguousarray(dst, dtype=np.uint64)
    cdef Py_ssize_t d = counters.shape[0], rows = counters.shape[1]
    cdef Py_ssize_t cols = counters.shape[2], n = sv.shape[0]
    cdef Py_ssize_t r, i
    cdef uint64_t bi, bj
    cdef int sat = 0
    with nogil:
        for r in range(d):
            for i in range(n):
                bi = _bucket(arv[r], brv[r], <uint64_t> rows, sv[i])
                bj = _bucket(acv[r], bcv[r], <uint64_t> cols, dv[i])
                if counters[r, bi, bj] == U32_MAX:
                    sat = 1
                else:
                    counters[r, bi, bj] += 1
    return bool(sat)


def mx_query(uint32_t[:, :, ::1] counters, ar, br, ac, bc, src, dst):
    """Layer-wise minimum cell per edge, shape (n,) uint64."""
    cdef uint64_t[::1] arv = np.ascontiguousarray(ar, dtype=np.uint64)
    cdef uint64_t[::1] brv = np.ascontiguousarray(br, dtype=np.uint64)
    cdef uint64_t[::1] acv = np.ascontiguousarray(ac, dtype=np.uint64)
    cdef uint64_t[::1] bcv = np.ascontiguousarray(bc, dtype=np.uint64)
    cdef uint64_t[::1] sv = np.ascontiguousarray(src, dtype=np.uint64)
    cdef uint64_t[::1] dv = np.ascontiguousarray(dst, dtype=np.uint64)
    cdef Py_ssize_t d = counters.shape[0], rows = counters.shape[1]
    cdef Py_ssize_t cols = counters.shape[2], n = sv.shape[0]
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef Py_ssize_t r, i
    cdef uint64_t est, c
    with nogil:
        for i in range(n):
            est = U32_MAX
            for r in range(d):
                c = counters[r,
                             _bucket(arv[r], brv[r], <uint64_t> rows, sv[i]),
                             _bucket(acv[r], bcv[r], <uint64_t> cols, dv[i])]
                if c < est:
                    est = c
            ov[i] = est
    return out
