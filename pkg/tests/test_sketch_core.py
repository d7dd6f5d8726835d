"""CountMin and matrix sketch behavior: sizing, overestimation, exactness."""

import math
import warnings
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmatrix.sketch_core import (
    COUNTER_BYTES,
    CountMinSketch,
    MatrixSketch,
    cm_dims_from_eps_delta,
    cm_dims_from_memory,
    encode_edge_keys,
    matrix_dims_from_memory,
)

edges_strategy = st.lists(
    st.tuples(st.integers(0, 500), st.integers(0, 500)), min_size=1, max_size=300)


# ----------------------------------------------------------------- sizing

def test_cm_dims_from_eps_delta():
    w, d = cm_dims_from_eps_delta(0.01, 0.01)
    assert w == math.ceil(math.e / 0.01) == 272
    assert d == math.ceil(math.log(100)) == 5


def test_cm_dims_validate():
    for eps, delta in ((0, 0.1), (1, 0.1), (0.1, 0), (0.1, 1)):
        with pytest.raises(ValueError):
            cm_dims_from_eps_delta(eps, delta)


def test_dims_from_memory():
    assert cm_dims_from_memory(7 * 4 * 1000, 7) == 1000
    assert matrix_dims_from_memory(7 * 4 * 100 * 100, 7) == 100
    assert matrix_dims_from_memory(7 * 4 * (100 * 100 + 50), 7) == 100  # floor


def test_dims_from_memory_reject_tiny():
    with pytest.raises(ValueError):
        cm_dims_from_memory(27, 7)
    with pytest.raises(ValueError):
        matrix_dims_from_memory(27, 7)


def test_counter_bytes_exact():
    assert CountMinSketch(100, 7).counter_bytes == COUNTER_BYTES * 100 * 7
    assert MatrixSketch(40, 5).counter_bytes == COUNTER_BYTES * 40 * 40 * 5
    assert MatrixSketch(3, 5, n_cols=200).counter_bytes == COUNTER_BYTES * 3 * 200 * 5


# ------------------------------------------------------------ key packing

def test_encode_edge_keys_injective_and_bounded():
    keys = encode_edge_keys([0, 1, (1 << 31) - 1], [0, 2, (1 << 31) - 1])
    assert len(set(keys.tolist())) == 3
    assert keys.dtype == np.uint64
    for bad in ([-1], [1 << 31]):
        with pytest.raises(ValueError):
            encode_edge_keys(bad, [0])
        with pytest.raises(ValueError):
            encode_edge_keys([0], bad)


# ---------------------------------------------------------- overestimation

@given(edges_strategy, st.integers(0, 5))
@settings(max_examples=40, deadline=None)
def test_countmin_overestimates(edges, seed):
    truth = Counter(edges)
    sk = CountMinSketch(64, 4, seed)
    for s, t in edges:
        sk.update(s, t)
    for (s, t), f in truth.items():
        assert sk.query_edge(s, t) >= f


@given(edges_strategy, st.integers(0, 5))
@settings(max_examples=40, deadline=None)
def test_matrix_overestimates(edges, seed):
    truth = Counter(edges)
    sk = MatrixSketch(16, 4, seed)
    for s, t in edges:
        sk.update(s, t)
    for (s, t), f in truth.items():
        assert sk.query_edge(s, t) >= f


@given(edges_strategy)
@settings(max_examples=30, deadline=None)
def test_rectangular_matrix_overestimates(edges):
    truth = Counter(edges)
    sk = MatrixSketch(2, 4, 3, n_cols=97)
    src = np.array([e[0] for e in edges])
    dst = np.array([e[1] for e in edges])
    sk.update_many(src, dst)
    est = sk.query_many(src, dst)
    for (s, t), e in zip(edges, est.tolist()):
        assert e >= truth[(s, t)]


# -------------------------------------------------------------- exactness

def test_collision_free_is_exact():
    # 50 distinct edges in a 200x200 matrix / 100k-wide CountMin: w.h.p.
    # no collisions, so estimates equal truths
    edges = [(i, i + 1) for i in range(50)] * 3
    truth = Counter(edges)
    for sk in (CountMinSketch(100_000, 7, 1), MatrixSketch(200, 7, 1)):
        for s, t in edges:
            sk.update(s, t)
        assert all(sk.query_edge(s, t) == f for (s, t), f in truth.items())


def test_unseen_edge_can_read_zero():
    sk = MatrixSketch(64, 7, 0)
    sk.update(1, 2)
    assert sk.query_edge(500, 600) == 0


# --------------------------------------------------------------- node out

def test_query_node_out_exact_when_sparse():
    sk = MatrixSketch(128, 7, 2)
    for t in (5, 6, 7):
        sk.update(1, t)
        sk.update(1, t)
    assert sk.query_node_out(1) == 6
    assert sk.query_node_out(99) == 0


def test_query_node_out_overestimates():
    sk = MatrixSketch(8, 4, 0)
    rng = np.random.default_rng(0)
    src = rng.integers(0, 50, 500)
    sk.update_many(src, rng.integers(0, 50, 500))
    truth = Counter(src.tolist())
    for v, f in truth.items():
        assert sk.query_node_out(int(v)) >= f


# ----------------------------------------------------------- reachability

def test_reachability_no_false_negative_small():
    sk = MatrixSketch(32, 4, 0)
    chain = [(1, 2), (2, 3), (3, 4)]
    for s, t in chain:
        sk.update(s, t)
    assert sk.query_reachable(1, 4)
    assert sk.query_reachable(2, 2)


def test_reachability_rejects_rectangular():
    sk = MatrixSketch(2, 4, 0, n_cols=32)
    with pytest.raises(ValueError):
        sk.query_reachable(1, 2)


# ------------------------------------------------------------- misc state

def test_kind_validation():
    with pytest.raises(ValueError):
        MatrixSketch(8, 4, kind="nope")
    assert MatrixSketch(8, 4, kind="tcm").kind == "tcm"


def test_tcm_and_gmatrix_coincide_for_equal_seed():
    a = MatrixSketch(32, 4, 5, kind="tcm")
    b = MatrixSketch(32, 4, 5, kind="gmatrix")
    rng = np.random.default_rng(2)
    src, dst = rng.integers(0, 99, 400), rng.integers(0, 99, 400)
    a.update_many(src, dst)
    b.update_many(src, dst)
    assert (a.query_many(src, dst) == b.query_many(src, dst)).all()


def test_update_count():
    sk = CountMinSketch(16, 2)
    sk.update_many(np.arange(10), np.arange(10))
    sk.update(1, 1)
    assert sk.update_count == 11


def test_saturation_warns_once():
    sk = CountMinSketch(1, 1)
    sk.counters[0, 0] = 0xFFFFFFFF
    with pytest.warns(RuntimeWarning):
        sk.update(1, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sk.update(1, 2)   # second saturation stays silent
