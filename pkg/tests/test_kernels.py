"""Backend equivalence and exact-arithmetic checks for the batch kernels.

The numpy fallback is always importable; when the compiled extension is
present the two must agree bit for bit on every operation.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmatrix import _kernels_py as kpy

try:
    from kmatrix import _kernels as kext
except ImportError:
    kext = None

PRIME = kpy.PRIME

needs_ext = pytest.mark.skipif(kext is None, reason="compiled backend not built")


def _params(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.integers(1, PRIME, d, dtype=np.uint64)
    b = rng.integers(0, PRIME, d, dtype=np.uint64)
    return a, b


@given(st.integers(1, PRIME - 1), st.integers(0, (1 << 62) - 1))
@settings(max_examples=300, deadline=None)
def test_mulmod_matches_python_ints(a, k):
    got = kpy._mulmod(np.uint64(a), np.asarray([k], dtype=np.uint64))[0]
    assert int(got) == (a * k) % PRIME


def test_mulmod_adversarial_operands():
    # extremes of both 32-bit halves and values straddling the prime
    specials = [0, 1, 2, (1 << 32) - 1, 1 << 32, PRIME - 1, PRIME,
                PRIME + 1, (1 << 61), (1 << 62) - 1]
    for a in [1, 2, (1 << 32) - 1, PRIME - 1, PRIME - 2]:
        got = kpy._mulmod(np.uint64(a), np.asarray(specials, dtype=np.uint64))
        want = [(a * k) % PRIME for k in specials]
        assert got.tolist() == want


def test_hash_buckets_matches_python_ints():
    a, b = _params(0, 5)
    keys = np.random.default_rng(1).integers(0, 1 << 62, 200, dtype=np.uint64)
    got = kpy.hash_buckets(a, b, 101, keys)
    for r in range(5):
        for i, k in enumerate(keys.tolist()):
            assert int(got[r, i]) == ((int(a[r]) * k + int(b[r])) % PRIME) % 101


@needs_ext
def test_backends_agree_on_hash_buckets():
    a, b = _params(3, 7)
    keys = np.random.default_rng(4).integers(0, 1 << 62, 5000, dtype=np.uint64)
    for w in (1, 2, 97, 1 << 20):
        assert (kext.hash_buckets(a, b, w, keys) == kpy.hash_buckets(a, b, w, keys)).all()


@needs_ext
def test_backends_agree_on_cm_ops():
    a, b = _params(5, 7)
    keys = np.random.default_rng(6).integers(0, 1 << 62, 3000, dtype=np.uint64)
    c1 = np.zeros((7, 211), dtype=np.uint32)
    c2 = c1.copy()
    s1 = kext.cm_update(c1, a, b, keys)
    s2 = kpy.cm_update(c2, a, b, keys)
    assert s1 == s2 and (c1 == c2).all()
    q = keys[:500]
    assert (kext.cm_query(c1, a, b, q) == kpy.cm_query(c2, a, b, q)).all()


@needs_ext
@pytest.mark.parametrize("shape", [(7, 31, 31), (7, 3, 311), (7, 1, 64)])
def test_backends_agree_on_mx_ops(shape):
    ar, br = _params(7, 7)
    ac, bc = _params(8, 7)
    rng = np.random.default_rng(9)
    src = rng.integers(0, 100000, 4000).astype(np.uint64)
    dst = rng.integers(0, 100000, 4000).astype(np.uint64)
    c1 = np.zeros(shape, dtype=np.uint32)
    c2 = c1.copy()
    assert kext.mx_update(c1, ar, br, ac, bc, src, dst) == \
        kpy.mx_update(c2, ar, br, ac, bc, src, dst)
    assert (c1 == c2).all()
    assert (kext.mx_query(c1, ar, br, ac, bc, src[:300], dst[:300])
            == kpy.mx_query(c2, ar, br, ac, bc, src[:300], dst[:300])).all()


def test_update_counts_are_conserved():
    a, b = _params(10, 4)
    keys = np.random.default_rng(11).integers(0, 1 << 40, 1234, dtype=np.uint64)
    c = np.zeros((4, 53), dtype=np.uint32)
    kpy.cm_update(c, a, b, keys)
    assert (c.sum(axis=1) == 1234).all()


def test_counters_saturate_instead_of_wrapping():
    a = np.asarray([1], dtype=np.uint64)
    b = np.asarray([0], dtype=np.uint64)
    c = np.full((1, 1), 0xFFFFFFFF - 1, dtype=np.uint32)
    assert kpy.cm_update(c, a, b, np.asarray([7], dtype=np.uint64)) is False
    assert c[0, 0] == 0xFFFFFFFF
    assert kpy.cm_update(c, a, b, np.asarray([7], dtype=np.uint64)) is True
    assert c[0, 0] == 0xFFFFFFFF  # pinned, not wrapped


@needs_ext
def test_compiled_saturation_matches():
    a = np.asarray([1], dtype=np.uint64)
    b = np.asarray([0], dtype=np.uint64)
    c = np.full((1, 1), 0xFFFFFFFF, dtype=np.uint32)
    assert kext.cm_update(c, a, b, np.asarray([7], dtype=np.uint64)) is True
    assert c[0, 0] == 0xFFFFFFFF
