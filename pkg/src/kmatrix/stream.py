"""Edge streams: parsing, sampling, synthesis, and the exact oracle.

Streams are stored as parallel numpy arrays of dense node ids, interned
from the input labels in first-seen order.  The exact oracle replays a
stream into plain dictionaries and is the ground truth for every error
metric in the benchmark harness.
"""

import gzip
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np


class Edge(NamedTuple):
    src: int
    dst: int


class ParseError(ValueError):
    """Malformed edge-list line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class GraphStream:
    """An ordered, replayable sequence of directed edges over dense ids."""

    src: np.ndarray  # int64
    dst: np.ndarray  # int64
    n_nodes: int
    source: str = "memory"
    labels: list | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.src)

    @property
    def m(self) -> int:
        return len(self.src)

    def __iter__(self) -> Iterator[Edge]:
        for s, t in zip(self.src.tolist(), self.dst.tolist()):
            yield Edge(s, t)

    def edge(self, i: int) -> Edge:
        return Edge(int(self.src[i]), int(self.dst[i]))


def stream_from_edges(edges, source: str = "memory") -> GraphStream:
    """Build a stream from (src, dst) pairs already carrying dense ids."""
    src = np.fromiter((e[0] for e in edges), dtype=np.int64)
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64)
    n = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1) if len(src) else 0
    return GraphStream(src=src, dst=dst, n_nodes=n, source=source)


def parse_edge_list(source, name: str = "edge-list") -> GraphStream:
    """Parse SNAP-style edge-list text into a stream.

    `source` is a path (str, '.gz' suffix means gzip) or an iterable of
    lines.  '#'-prefixed lines are comments; data lines hold at least two
    whitespace-separated labels (extra tokens such as timestamps are
    ignored).  Labels are interned to dense ids in first-seen order.
    """
    if isinstance(source, str):
        name = source
        opener = gzip.open if source.endswith(".gz") else open
        with opener(source, "rt") as fh:
            return parse_edge_list(fh, name=name)

    intern: dict[str, int] = {}
    labels: list[str] = []
    src: list[int] = []
    dst: list[int] = []

    def to_id(label: str) -> int:
        i = intern.get(label)
        if i is None:
            i = len(intern)
            intern[label] = i
            labels.append(label)
        return i

    for line_no, line in enumerate(source, start=1):
        if line.startswith("#"):
            continue
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) < 2:
            raise ParseError(line_no, f"expected two labels, got {line.rstrip()!r}")
        src.append(to_id(tokens[0]))
        dst.append(to_id(tokens[1]))

    return GraphStream(
        src=np.asarray(src, dtype=np.int64),
        dst=np.asarray(dst, dtype=np.int64),
        n_nodes=len(intern),
        source=name,
        labels=labels,
    )


def reservoir_sample(stream: GraphStream, k: int, seed: int) -> list[Edge]:
    """Uniform k-edge sample by the standard reservoir algorithm.

    Deterministic per seed; returns every edge when k >= len(stream).
    Result order is reservoir order, not stream order.
    """
    if k < 1:
        raise ValueError(f"sample size must be >= 1, got {k}")
    rng = random.Random(seed)
    reservoir: list[int] = []
    for i in range(len(stream)):
        if i < k:
            reservoir.append(i)
        else:
            j = rng.randrange(i + 1)
            if j < k:
                reservoir[j] = i
    return [stream.edge(i) for i in reservoir]


def prefilter(stream: GraphStream, fraction: float, seed: int) -> GraphStream:
    """Keep a uniform `fraction` of edges, preserving stream order."""
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    k = max(1, int(len(stream) * fraction))
    rng = random.Random(seed)
    reservoir = list(range(min(k, len(stream))))
    for i in range(k, len(stream)):
        j = rng.randrange(i + 1)
        if j < k:
            reservoir[j] = i
    keep = np.asarray(sorted(reservoir), dtype=np.int64)
    return GraphStream(
        src=stream.src[keep],
        dst=stream.dst[keep],
        n_nodes=stream.n_nodes,
        source=f"{stream.source}[{fraction:g}]",
        labels=stream.labels,
    )


@dataclass
class ExactOracle:
    """Exact frequencies and adjacency for a replayed stream."""

    edge_freq: Counter
    node_out_freq: Counter
    adjacency: dict[int, set[int]]
    total_edges: int

    def freq(self, i: int, j: int) -> int:
        return self.edge_freq[(i, j)]

    def out_freq(self, v: int) -> int:
        return self.node_out_freq[v]


def oracle_build(stream: GraphStream) -> ExactOracle:
    """Single-pass exact count of edge and node-out frequencies."""
    edge_freq: Counter = Counter(zip(stream.src.tolist(), stream.dst.tolist()))
    node_out_freq: Counter = Counter()
    adjacency: dict[int, set[int]] = {}
    for (s, t), c in edge_freq.items():
        node_out_freq[s] += c
        adjacency.setdefault(s, set()).add(t)
    return ExactOracle(
        edge_freq=edge_freq,
        node_out_freq=node_out_freq,
        adjacency=adjacency,
        total_edges=len(stream),
    )


def oracle_reachable(oracle: ExactOracle, a: int, b: int) -> bool:
    """Directed BFS over exact adjacency; reachable(a, a) is True."""
    if a == b:
        return True
    seen = {a}
    frontier = [a]
    while frontier:
        nxt = []
        for u in frontier:
            for v in oracle.adjacency.get(u, ()):
                if v == b:
                    return True
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return False


def synth_zipf(n_nodes: int, n_edges: int, skew: float, seed: int) -> GraphStream:
    """Generate a stream whose endpoints follow a Zipf(skew) rank law.

    Node id equals popularity rank (0 is the most frequent endpoint);
    self-loops are allowed.  skew = 0 degenerates to uniform endpoints.
    """
    if n_nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {n_nodes}")
    if n_edges < 1:
        raise ValueError(f"need at least 1 edge, got {n_edges}")
    if skew < 0:
        raise ValueError(f"skew must be >= 0, got {skew}")
    ranks = np.arange(1, n_nodes + 1, dtype=np.float64)
    p = ranks ** -skew
    p /= p.sum()
    rng = np.random.default_rng(seed)
    endpoints = rng.choice(n_nodes, size=2 * n_edges, replace=True, p=p)
    return GraphStream(
        src=endpoints[:n_edges].astype(np.int64),
        dst=endpoints[n_edges:].astype(np.int64),
        n_nodes=n_nodes,
        source=f"zipf:{n_nodes}:{n_edges}:{skew:g}:{seed}",
    )
