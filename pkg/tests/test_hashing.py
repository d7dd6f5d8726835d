"""Hash family determinism, range, and statistical quality."""

import numpy as np
import pytest
from scipy import stats as sps

from kmatrix.hashing import HashFamily, bucket, make_family
from kmatrix.kernels import PRIME


def test_same_seed_same_family():
    f1 = make_family(42, 5, 100)
    f2 = make_family(42, 5, 100)
    assert (f1.a == f2.a).all() and (f1.b == f2.b).all()


def test_different_seeds_differ():
    assert (make_family(1, 5, 100).a != make_family(2, 5, 100).a).any()


def test_parameter_ranges():
    f = make_family(0, 50, 10)
    assert (f.a >= 1).all() and (f.a < PRIME).all()
    assert (f.b >= 0).all() and (f.b < PRIME).all()


def test_buckets_in_range():
    f = make_family(3, 7, 13)
    out = f.buckets(np.arange(10000))
    assert out.shape == (7, 10000)
    assert out.max() < 13


def test_scalar_bucket_matches_batch():
    f = make_family(9, 4, 997)
    keys = [0, 1, 2, 12345, (1 << 40) + 17]
    batch = f.buckets(keys)
    for r in range(4):
        for i, k in enumerate(keys):
            assert bucket(f, r, k) == int(batch[r, i])


def test_bucket_rejects_bad_function_index():
    f = make_family(0, 3, 8)
    with pytest.raises(IndexError):
        bucket(f, 3, 1)


@pytest.mark.parametrize("bad", [("d", 0), ("w", 0)])
def test_make_family_validates(bad):
    kwargs = {"d": 4, "w": 16, bad[0]: bad[1]}
    with pytest.raises(ValueError):
        make_family(0, **kwargs)


def test_bucket_distribution_is_uniform():
    """Chi-square on bucket occupancy of sequential keys.

    Threshold from scipy's chi2 inverse CDF at the 1e-4 tail so the test
    is deterministic for the fixed seed yet sensitive to real skew.
    """
    w = 64
    f = make_family(17, 1, w)
    counts = np.bincount(f.buckets(np.arange(100000))[0].astype(np.int64), minlength=w)
    expected = 100000 / w
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < sps.chi2.ppf(1 - 1e-4, df=w - 1)


def test_pairwise_collision_rate():
    # pairwise independence => P[h(x) = h(y)] ~ 1/w for x != y
    w = 128
    rng = np.random.default_rng(21)
    xs = rng.integers(0, 1 << 48, 4000, dtype=np.uint64)
    ys = rng.integers(0, 1 << 48, 4000, dtype=np.uint64)
    xs, ys = xs[xs != ys], ys[xs != ys]
    collisions = 0
    trials = 0
    for seed in range(30):
        f = make_family(seed, 1, w)
        collisions += int((f.buckets(xs)[0] == f.buckets(ys)[0]).sum())
        trials += len(xs)
    rate = collisions / trials
    # binomial(trials, 1/w): 6 sigma band around the mean
    sigma = (1 / w * (1 - 1 / w) / trials) ** 0.5
    assert abs(rate - 1 / w) < 6 * sigma


def test_family_is_frozen():
    f = make_family(0, 2, 4)
    with pytest.raises(AttributeError):
        f.w = 8
