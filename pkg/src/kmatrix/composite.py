"""Partitioned sketches: gSketch (CountMin locals) and kMatrix (matrix locals).

A plan built from a stream sample routes every edge by its source vertex
to exactly one local sketch; vertices unseen in the sample go to the
residual.  kMatrix additionally tracks the set of observed vertices so
reachability can BFS over concrete candidate nodes.
"""

import numpy as np

from kmatrix.partitioner import PartitionPlan, estimate_stats
from kmatrix.partitioner import plan as build_plan
from kmatrix.sketch_core import CountMinSketch, MatrixSketch, cm_dims_from_memory


def _partition_seed(seed: int, index: int) -> int:
    # distinct deterministic seed per local sketch
    return (seed * 0x9E3779B97F4A7C15 + index + 1) % (1 << 62)


class _PartitionedBase:
    """Shared routing and bookkeeping for the partitioned sketches."""

    plan: PartitionPlan
    locals: list

    def __init__(self, plan: PartitionPlan):
        self.plan = plan
        n = len(plan.partitions)
        self._route_table = np.full(
            max((v for v in plan.assignment), default=-1) + 1, n, dtype=np.int64)
        for v, p in plan.assignment.items():
            self._route_table[v] = p
        self.update_counts = np.zeros(n + 1, dtype=np.int64)

    def route_many(self, src) -> np.ndarray:
        src = np.asarray(src, dtype=np.int64)
        routes = np.full(len(src), self.plan.residual_index, dtype=np.int64)
        known = src < len(self._route_table)
        routes[known] = self._route_table[src[known]]
        return routes

    def route(self, v: int) -> int:
        return self.plan.route(v)

    @property
    def counter_bytes(self) -> int:
        return sum(sk.counter_bytes for sk in self.locals)

    @property
    def update_count(self) -> int:
        return int(self.update_counts.sum())

    def update(self, src: int, dst: int):
        self.update_many(np.asarray([src]), np.asarray([dst]))

    def update_many(self, src, dst):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        routes = self.route_many(src)
        for p in np.unique(routes):
            mask = routes == p
            self.locals[p].update_many(src[mask], dst[mask])
            self.update_counts[p] += int(mask.sum())
        self._after_update(src, dst)

    def _after_update(self, src, dst):
        pass

    def query_edge(self, i: int, j: int) -> int:
        return int(self.query_many([i], [j])[0])

    def query_many(self, src, dst) -> np.ndarray:
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        routes = self.route_many(src)
        out = np.zeros(len(src), dtype=np.uint64)
        for p in np.unique(routes):
            mask = routes == p
            out[mask] = self.locals[p].query_many(src[mask], dst[mask])
        return out


class GSketchSummary(_PartitionedBase):
    """Partitioned CountMin; supports edge-frequency queries only."""

    def __init__(self, plan: PartitionPlan, d: int, seed: int):
        super().__init__(plan)
        self.d = d
        self.locals = [
            CountMinSketch(cm_dims_from_memory(p.n_bytes, d), d, _partition_seed(seed, i))
            for i, p in enumerate(plan.partitions)
        ]
        self.locals.append(CountMinSketch(
            cm_dims_from_memory(plan.residual_bytes, d), d,
            _partition_seed(seed, len(plan.partitions))))


class KMatrixSummary(_PartitionedBase):
    """Partitioned matrix sketch; answers every gMatrix-style query."""

    def __init__(self, plan: PartitionPlan, d: int, seed: int,
                 sample_vertices=()):
        super().__init__(plan)
        self.d = d
        self.locals = [
            MatrixSketch(p.rows, d, _partition_seed(seed, i),
                         n_cols=None if p.rows == p.cols else p.cols)
            for i, p in enumerate(plan.partitions)
        ]
        self.locals.append(MatrixSketch(
            plan.residual_width, d, _partition_seed(seed, len(plan.partitions))))
        self.vertex_dict: set[int] = set(sample_vertices)
        self._reach_cache: tuple[int, dict[int, list[int]]] | None = None
        self._dict_version = 0

    def _after_update(self, src, dst):
        before = len(self.vertex_dict)
        self.vertex_dict.update(src.tolist())
        self.vertex_dict.update(dst.tolist())
        if len(self.vertex_dict) != before:
            self._dict_version += 1

    def query_node_out(self, v: int) -> int:
        return self.locals[self.route(v)].query_node_out(v)

    def _candidate_graph(self) -> dict[int, list[int]]:
        """Over-approximate adjacency over the vertex dictionary: u -> v iff
        u's local sketch holds a nonzero cell for (u, v) in every layer."""
        version = (self._dict_version, tuple(sk._version for sk in self.locals))
        if self._reach_cache is not None and self._reach_cache[0] == version:
            return self._reach_cache[1]
        candidates = np.asarray(sorted(self.vertex_dict), dtype=np.int64)
        graph: dict[int, list[int]] = {}
        for u in candidates.tolist():
            sk = self.locals[self.route(u)]
            est = sk.query_many(np.full(len(candidates), u, dtype=np.int64), candidates)
            graph[u] = candidates[est > 0].tolist()
        self._reach_cache = (version, graph)
        return graph

    def query_reachable(self, a: int, b: int) -> bool:
        if a == b:
            return True
        graph = self._candidate_graph()
        # b may be absent from the dictionary; check direct arcs into it
        seen = {a}
        frontier = [a]
        while frontier:
            nxt = []
            for u in frontier:
                sk = self.locals[self.route(u)]
                if b not in self.vertex_dict and sk.query_edge(u, b) > 0:
                    return True
                for v in graph.get(u, ()) if u in graph else self._arcs_from(u):
                    if v == b:
                        return True
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return False

    def _arcs_from(self, u: int) -> list[int]:
        candidates = np.asarray(sorted(self.vertex_dict), dtype=np.int64)
        if not len(candidates):
            return []
        sk = self.locals[self.route(u)]
        est = sk.query_many(np.full(len(candidates), u, dtype=np.int64), candidates)
        return candidates[est > 0].tolist()


def build_gsketch(sample, total_bytes: int, d: int, seed: int,
                  **planner_options) -> GSketchSummary:
    """Plan partitions from the sample and allocate CountMin locals."""
    stats = estimate_stats(sample)
    p = build_plan(stats, total_bytes, d, **planner_options)
    return GSketchSummary(p, d, seed)


def build_kmatrix(sample, total_bytes: int, d: int, seed: int,
                  **planner_options) -> KMatrixSummary:
    """Plan partitions from the sample and allocate matrix locals."""
    stats = estimate_stats(sample)
    p = build_plan(stats, total_bytes, d, **planner_options)
    vertices = {e[0] for e in sample} | {e[1] for e in sample}
    return KMatrixSummary(p, d, seed, sample_vertices=vertices)
