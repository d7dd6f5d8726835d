"""Monolithic sketches: CountMin and the layered w x w matrix sketch.

The matrix sketch serves both TCM and gMatrix; the two differ only in the
hash-family requirement, which this implementation satisfies for both
(pairwise-independent affine-modular functions).  Counters are unsigned
32-bit and saturate at 2^32 - 1 instead of wrapping, so the overestimation
guarantee survives pathological streams.
"""

import math
import warnings

import numpy as np

from kmatrix import kernels
from kmatrix.hashing import HashFamily, make_family

COUNTER_BYTES = 4

# Injective (src, dst) -> key packing for CountMin; requires ids < 2^31.
_PAIR_SHIFT = 31
_MAX_ID = 1 << 31


def encode_edge_keys(src, dst) -> np.ndarray:
    """Pack (src, dst) id pairs into single uint64 CountMin keys."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if len(src) and (src.max() >= _MAX_ID or dst.max() >= _MAX_ID or src.min() < 0 or dst.min() < 0):
        raise ValueError("node ids must be in [0, 2^31)")
    return (src.astype(np.uint64) << np.uint64(_PAIR_SHIFT)) | dst.astype(np.uint64)


def cm_dims_from_eps_delta(epsilon: float, delta: float) -> tuple[int, int]:
    """CountMin (w, d) = (ceil(e/epsilon), ceil(ln(1/delta)))."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.ceil(math.e / epsilon), math.ceil(math.log(1 / delta))


def cm_dims_from_memory(n_bytes: int, d: int) -> int:
    """Largest CountMin width whose d x w counter array fits n_bytes."""
    if n_bytes < COUNTER_BYTES * d:
        raise ValueError(f"budget {n_bytes} B too small for one counter per row at d={d}")
    return n_bytes // (COUNTER_BYTES * d)


def matrix_dims_from_memory(n_bytes: int, d: int) -> int:
    """Largest matrix side length whose d layers of w x w counters fit n_bytes."""
    if n_bytes < COUNTER_BYTES * d:
        raise ValueError(f"budget {n_bytes} B too small for one cell per layer at d={d}")
    return int(math.isqrt(n_bytes // (COUNTER_BYTES * d)))


class _SketchBase:
    family: HashFamily
    counters: np.ndarray

    def __init__(self):
        self._saturated = False
        self._version = 0

    @property
    def counter_bytes(self) -> int:
        return self.counters.nbytes

    @property
    def update_count(self) -> int:
        return self._updates

    def _note_saturation(self, sat: bool):
        if sat and not self._saturated:
            self._saturated = True
            warnings.warn("counter saturated at 2^32 - 1; estimates may undercount",
                          RuntimeWarning, stacklevel=3)


class CountMinSketch(_SketchBase):
    """d rows of w counters; edges keyed by the packed (src, dst) pair."""

    def __init__(self, w: int, d: int, seed: int = 0):
        super().__init__()
        self.w = w
        self.d = d
        self.family = make_family(seed, d, w)
        self.counters = np.zeros((d, w), dtype=np.uint32)
        self._updates = 0
        assert self.counters.nbytes == COUNTER_BYTES * w * d

    def update(self, src: int, dst: int):
        self.update_many(np.asarray([src]), np.asarray([dst]))

    def update_many(self, src, dst):
        keys = encode_edge_keys(src, dst)
        sat = kernels.cm_update(self.counters, self.family.a, self.family.b, keys)
        self._updates += len(keys)
        self._version += 1
        self._note_saturation(sat)

    def query_edge(self, i: int, j: int) -> int:
        return int(self.query_many([i], [j])[0])

    def query_many(self, src, dst) -> np.ndarray:
        keys = encode_edge_keys(src, dst)
        return kernels.cm_query(self.counters, self.family.a, self.family.b, keys)


_COL_SEED_SALT = 0x9E3779B97F4A7C15


class MatrixSketch(_SketchBase):
    """d layers of rows x cols counters; edge (i, j) lands at (h_r(i), g_r(j)).

    The default is the square layout with a single shared function per
    layer (h_r = g_r), which is what TCM and gMatrix prescribe.  Passing
    n_cols builds a rectangular layer with an independent column family;
    the partitioned summary uses this for locals whose source set is
    small, trading unneeded row resolution for destination resolution.

    kind is "tcm" or "gmatrix"; both use the same pairwise-independent
    family here, which only strengthens TCM.
    """

    def __init__(self, w: int, d: int, seed: int = 0, kind: str = "gmatrix",
                 n_cols: int | None = None):
        super().__init__()
        if kind not in ("tcm", "gmatrix"):
            raise ValueError(f"unknown matrix sketch kind {kind!r}")
        self.w = w
        self.rows = w
        self.cols = w if n_cols is None else n_cols
        self.square = n_cols is None
        self.d = d
        self.kind = kind
        self.family = make_family(seed, d, self.rows)
        self.col_family = (self.family if self.square
                           else make_family(seed ^ _COL_SEED_SALT, d, self.cols))
        self.counters = np.zeros((d, self.rows, self.cols), dtype=np.uint32)
        self._updates = 0
        self._adj_cache: tuple[int, list[list[np.ndarray]]] | None = None
        assert self.counters.nbytes == COUNTER_BYTES * self.rows * self.cols * d

    def update(self, src: int, dst: int):
        self.update_many(np.asarray([src]), np.asarray([dst]))

    def update_many(self, src, dst):
        src = np.asarray(src, dtype=np.uint64)
        dst = np.asarray(dst, dtype=np.uint64)
        sat = kernels.mx_update(self.counters, self.family.a, self.family.b,
                                self.col_family.a, self.col_family.b, src, dst)
        self._updates += len(src)
        self._version += 1
        self._note_saturation(sat)

    def query_edge(self, i: int, j: int) -> int:
        return int(self.query_many([i], [j])[0])

    def query_many(self, src, dst) -> np.ndarray:
        src = np.asarray(src, dtype=np.uint64)
        dst = np.asarray(dst, dtype=np.uint64)
        return kernels.mx_query(self.counters, self.family.a, self.family.b,
                                self.col_family.a, self.col_family.b, src, dst)

    def query_node_out(self, v: int) -> int:
        """Min over layers of the total count in v's hashed row."""
        rows = self.family.buckets([v])[:, 0]
        sums = [int(self.counters[r, int(rows[r]), :].sum(dtype=np.uint64))
                for r in range(self.d)]
        return min(sums)

    def _layer_adjacency(self) -> list[list[np.ndarray]]:
        """Per layer, bucket -> array of out-neighbor buckets (nonzero cells)."""
        if self._adj_cache is not None and self._adj_cache[0] == self._version:
            return self._adj_cache[1]
        adj = []
        for r in range(self.d):
            rows, cols = np.nonzero(self.counters[r])
            layer: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * self.w
            if len(rows):
                order = np.argsort(rows, kind="stable")
                rows, cols = rows[order], cols[order]
                starts = np.searchsorted(rows, np.arange(self.w))
                ends = np.searchsorted(rows, np.arange(self.w), side="right")
                layer = [cols[starts[i]:ends[i]] for i in range(self.w)]
            adj.append(layer)
        self._adj_cache = (self._version, adj)
        return adj

    def query_reachable(self, a: int, b: int) -> bool:
        """BFS over nonzero cells in each layer; True only if every layer
        connects h_r(a) to h_r(b).  Over-approximate per layer, so the
        conjunction still never misses a true path."""
        if not self.square:
            raise ValueError("bucket-space reachability requires the square layout")
        if a == b:
            return True
        adj = self._layer_adjacency()
        ba = self.family.buckets([a])[:, 0]
        bb = self.family.buckets([b])[:, 0]
        for r in range(self.d):
            if not _bucket_bfs(adj[r], int(ba[r]), int(bb[r]), self.w):
                return False
        return True


def _bucket_bfs(layer: list[np.ndarray], start: int, goal: int, w: int) -> bool:
    if start == goal:
        return True
    seen = np.zeros(w, dtype=bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in layer[u].tolist():
                if v == goal:
                    return True
                if not seen[v]:
                    seen[v] = True
                    nxt.append(v)
        frontier = nxt
    return False
