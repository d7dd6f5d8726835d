"""Benchmark runners: build-time measurement, edge-query accuracy sweeps,
and CSV result emission.

Everything except wall-clock metrics is deterministic for a fixed config
and seed; the partitioning sample and the query sample use seeds derived
separately from the master seed so they never couple.
"""

import hashlib
import sys
import time
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from kmatrix.composite import build_gsketch, build_kmatrix
from kmatrix.metrics import (
    QueryOutcome,
    average_relative_error,
    effective_queries,
    percentage_effective,
)
from kmatrix.sketch_core import (
    CountMinSketch,
    MatrixSketch,
    cm_dims_from_memory,
    matrix_dims_from_memory,
)
from kmatrix.stream import (
    GraphStream,
    oracle_build,
    parse_edge_list,
    prefilter,
    reservoir_sample,
    synth_zipf,
)

SKETCH_KINDS = ("countmin", "gsketch", "tcm", "gmatrix", "kmatrix")
PARTITIONED = ("gsketch", "kmatrix")

SWEEP_BUDGETS_KB = (200, 300, 400, 512)
BUILD_BUDGET_KB = 1024
DEFAULT_DEPTH = 7
DEFAULT_SAMPLE = 30_000
DEFAULT_QUERIES = 10_000
DEFAULT_G0 = 10


class ResultRow(NamedTuple):
    sketch: str
    dataset: str
    n_bytes: int
    depth: int
    seed: int
    metric: str
    value: float
    g0: Optional[int]


@dataclass
class ExperimentConfig:
    sketches: list[str] = field(default_factory=lambda: list(SKETCH_KINDS))
    dataset: str = ""
    memory_kb: list[int] = field(default_factory=lambda: list(SWEEP_BUDGETS_KB))
    depth: int = DEFAULT_DEPTH
    sample_size: int = DEFAULT_SAMPLE
    queries: int = DEFAULT_QUERIES
    seed: int = 0
    g0: int = DEFAULT_G0
    residual_fraction: float = 0.10
    min_width: int = 4
    max_partitions: int = 64
    prefilter_fraction: float = 0.0

    def planner_options(self) -> dict:
        return {
            "residual_fraction": self.residual_fraction,
            "min_width": self.min_width,
            "max_partitions": self.max_partitions,
        }


def derive_seed(master: int, tag: str) -> int:
    """Stable sub-seed for independent random choices (plan vs query)."""
    digest = hashlib.blake2b(f"{master}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def load_stream(cfg: ExperimentConfig) -> GraphStream:
    """Resolve the dataset field: a zipf:<nodes>:<edges>:<skew>[:<seed>]
    spec generates a synthetic stream, anything else is a file path."""
    spec = cfg.dataset
    if spec.startswith("zipf:"):
        parts = spec.split(":")[1:]
        if len(parts) not in (3, 4):
            raise ValueError(f"bad synthetic spec {spec!r}; "
                             "expected zipf:<nodes>:<edges>:<skew>[:<seed>]")
        n_nodes, n_edges, skew = int(parts[0]), int(parts[1]), float(parts[2])
        seed = int(parts[3]) if len(parts) == 4 else derive_seed(cfg.seed, "synth")
        stream = synth_zipf(n_nodes, n_edges, skew, seed)
    else:
        stream = parse_edge_list(spec)
    if cfg.prefilter_fraction:
        stream = prefilter(stream, cfg.prefilter_fraction,
                           derive_seed(cfg.seed, "prefilter"))
    return stream


def build_sketch(kind: str, stream: GraphStream, n_bytes: int, cfg: ExperimentConfig):
    """Allocate (and, for partitioned kinds, plan) a sketch of one kind."""
    d = cfg.depth
    if kind == "countmin":
        return CountMinSketch(cm_dims_from_memory(n_bytes, d), d, cfg.seed)
    if kind in ("tcm", "gmatrix"):
        return MatrixSketch(matrix_dims_from_memory(n_bytes, d), d, cfg.seed, kind=kind)
    if kind in PARTITIONED:
        sample = reservoir_sample(stream, min(cfg.sample_size, len(stream)),
                                  derive_seed(cfg.seed, f"plan:{n_bytes}"))
        builder = build_gsketch if kind == "gsketch" else build_kmatrix
        return builder(sample, n_bytes, d, cfg.seed, **cfg.planner_options())
    raise ValueError(f"unknown sketch kind {kind!r}")


def _log(msg: str):
    print(msg, file=sys.stderr, flush=True)


def run_buildtime(cfg: ExperimentConfig, stream: GraphStream | None = None) -> list[ResultRow]:
    """Time initialization and a full single-pass stream at a fixed budget."""
    if stream is None:
        stream = load_stream(cfg)
    n_bytes = (cfg.memory_kb[0] if cfg.memory_kb else BUILD_BUDGET_KB) * 1024
    rows = []
    for kind in cfg.sketches:
        _log(f"[build] {kind} on {stream.source} at {n_bytes} B")
        t0 = time.perf_counter()
        sk = build_sketch(kind, stream, n_bytes, cfg)
        t1 = time.perf_counter()
        sk.update_many(stream.src, stream.dst)
        t2 = time.perf_counter()
        base = (kind, stream.source, n_bytes, cfg.depth, cfg.seed)
        rows.append(ResultRow(*base, "init_seconds", t1 - t0, None))
        rows.append(ResultRow(*base, "build_seconds", t2 - t0, None))
        rows.append(ResultRow(*base, "edges_per_second", len(stream) / (t2 - t1), None))
    return rows


def run_edge_query_sweep(cfg: ExperimentConfig, stream: GraphStream | None = None) -> list[ResultRow]:
    """Accuracy sweep over memory budgets: ARE, NEQ, and PEQ per cell."""
    if stream is None:
        stream = load_stream(cfg)
    oracle = oracle_build(stream)
    n_queries = min(cfg.queries, len(stream))
    query_edges = reservoir_sample(stream, n_queries, derive_seed(cfg.seed, "query"))
    truths = [oracle.freq(i, j) for i, j in query_edges]
    qsrc = [e.src for e in query_edges]
    qdst = [e.dst for e in query_edges]

    rows = []
    for kind in cfg.sketches:
        for kb in cfg.memory_kb:
            n_bytes = kb * 1024
            _log(f"[sweep] {kind} on {stream.source} at {kb} KB")
            sk = build_sketch(kind, stream, n_bytes, cfg)
            sk.update_many(stream.src, stream.dst)
            estimates = sk.query_many(qsrc, qdst)
            outcomes = [QueryOutcome(int(e), t) for e, t in zip(estimates, truths)]
            base = (kind, stream.source, n_bytes, cfg.depth, cfg.seed)
            rows.append(ResultRow(*base, "ARE", average_relative_error(outcomes), None))
            rows.append(ResultRow(*base, "NEQ", float(effective_queries(outcomes, cfg.g0)), cfg.g0))
            rows.append(ResultRow(*base, "PEQ", percentage_effective(outcomes, cfg.g0), cfg.g0))
    return rows


CSV_HEADER = "sketch,dataset,bytes,depth,seed,metric,value,g0"


def emit_csv(rows: Iterable[ResultRow], sink) -> None:
    """Write rows in config order; values get 6 significant digits."""
    sink.write(CSV_HEADER + "\n")
    for r in rows:
        g0 = "" if r.g0 is None else str(r.g0)
        sink.write(f"{r.sketch},{r.dataset},{r.n_bytes},{r.depth},{r.seed},"
                   f"{r.metric},{r.value:.6g},{g0}\n")


def parse_csv(lines: Iterable[str]) -> list[ResultRow]:
    """Inverse of emit_csv over its own output."""
    rows = []
    for i, line in enumerate(lines):
        line = line.rstrip("\n")
        if i == 0:
            if line != CSV_HEADER:
                raise ValueError(f"unexpected CSV header {line!r}")
            continue
        if not line:
            continue
        f = line.split(",")
        if len(f) != 8:
            raise ValueError(f"expected 8 fields, got {len(f)}: {line!r}")
        rows.append(ResultRow(f[0], f[1], int(f[2]), int(f[3]), int(f[4]),
                              f[5], float(f[6]), int(f[7]) if f[7] else None))
    return rows
