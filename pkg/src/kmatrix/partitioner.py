"""Sample-driven partitioning of a sketch's memory budget.

Vertex statistics from a stream sample feed a per-partition collision
model; the planner sorts source vertices by total sampled frequency and
greedily splits the sorted order wherever the modeled total error drops,
then carves the byte budget across the resulting partitions in the
model-optimal proportions.  Edges from vertices absent from the sample
route to a residual partition.

The collision model: a partition holding source set S in d layers of
rows x cols counters inflates the estimate for an edge out of m by about
f(m)/cols (same source, column collision) plus (F(S)-f(m))/(rows*cols)
(other sources, full collision).  Summed over S in relative terms this
gives

    N(S, rows) = (rows - 1) * sum_m d(m)^2  +  F(S) * sum_m d(m)^2/f(m)

with partition error N / cells.  For a fixed cell total, the optimal
allocation puts cells proportional to sqrt(N), making the total error
proportional to (sum_i sqrt(N_i))^2 -- the quantity the greedy splitter
minimizes.  Because sqrt is strictly concave, splitting a homogeneous
segment is penalized and the recursion stops on its own; the wins come
from separating high-frequency sources, whose cross-collision terms
vanish and whose partitions collapse to a few very wide rows.
"""

import math
from dataclasses import dataclass, field

from kmatrix.sketch_core import COUNTER_BYTES

_EPS = 1e-12


class InfeasibleBudgetError(ValueError):
    """Budget cannot fit a residual plus one data partition at min width."""

    def __init__(self, message: str, minimal_bytes: int):
        super().__init__(f"{message} (minimal feasible budget: {minimal_bytes} bytes)")
        self.minimal_bytes = minimal_bytes


@dataclass
class VertexStats:
    """Per-source-vertex sampled frequency and distinct out-degree."""

    freq: dict[int, int]      # f~_v(m): sampled outgoing edge count
    out_deg: dict[int, int]   # d~(m): distinct sampled out-neighbors

    def avg(self, m: int) -> float:
        return self.freq[m] / self.out_deg[m]

    def total_freq(self, vertices) -> int:
        """F~(S): summed sampled frequency of a vertex set."""
        return sum(self.freq[m] for m in vertices)

    def vertices(self):
        return self.freq.keys()


def estimate_stats(sample) -> VertexStats:
    """Count per-vertex outgoing frequency and distinct out-neighbors."""
    if not sample:
        raise ValueError("sample must be non-empty")
    freq: dict[int, int] = {}
    neighbors: dict[int, set[int]] = {}
    for s, t in sample:
        freq[s] = freq.get(s, 0) + 1
        neighbors.setdefault(s, set()).add(t)
    return VertexStats(freq=freq, out_deg={m: len(v) for m, v in neighbors.items()})


def expected_error(vertices, stats: VertexStats, w: int) -> float:
    """Modeled total relative error of one square partition of width w.

    sum_m d(m)^2 * F(S) / (w * f(m))  -  sum_m d(m) / w
    """
    if w < 1:
        raise ValueError(f"width must be >= 1, got {w}")
    vs = list(vertices)
    if not vs:
        return 0.0
    total = stats.total_freq(vs)
    first = sum(stats.out_deg[m] ** 2 * total / stats.freq[m] for m in vs)
    second = sum(stats.out_deg[m] for m in vs)
    return (first - second) / w


def split_cost(s1, s2, stats: VertexStats) -> float:
    """Width-independent cost of a candidate bipartition.

    sum over each side of d(m)^2 * F(side) / f(m); lower is better, and
    the no-split case is scored with the whole set on one side.
    """
    s1, s2 = list(s1), list(s2)
    if set(s1) & set(s2):
        raise ValueError("split sides must be disjoint")
    cost = 0.0
    for side in (s1, s2):
        if not side:
            continue
        total = stats.total_freq(side)
        cost += sum(stats.out_deg[m] ** 2 * total / stats.freq[m] for m in side)
    return cost


@dataclass
class Partition:
    vertices: tuple[int, ...]
    rows: int
    cols: int
    n_bytes: int
    sampled_freq: int

    @property
    def width(self) -> int:
        # query resolution of the partition: its column count
        return self.cols


@dataclass
class PartitionPlan:
    partitions: list[Partition]
    residual_width: int
    residual_bytes: int
    assignment: dict[int, int] = field(repr=False)
    d: int = 7

    @property
    def residual_index(self) -> int:
        return len(self.partitions)

    def route(self, v: int) -> int:
        return self.assignment.get(v, self.residual_index)

    def dump(self) -> str:
        lines = ["index rows cols bytes vertices sampled_freq"]
        for i, p in enumerate(self.partitions):
            lines.append(f"{i} {p.rows} {p.cols} {p.n_bytes} {len(p.vertices)} {p.sampled_freq}")
        lines.append(f"residual {self.residual_width} {self.residual_width} "
                     f"{self.residual_bytes} - -")
        return "\n".join(lines) + "\n"


def _geometry(cells: int, n_sources: int) -> tuple[int, int]:
    """Rows and columns for a partition: one row per source, capped so the
    layer never gets taller than it is wide."""
    rows = max(1, min(n_sources, math.isqrt(cells)))
    return rows, cells // rows


def _floored_shares(weights: list[float], total: int, floor: int) -> list[int]:
    """Carve `total` bytes proportionally to `weights` with a per-share floor.

    Zero-weight shares get only the floor; the rounding remainder goes to
    the first share.  Falls back to equal shares if the floors don't fit.
    """
    n = len(weights)
    if floor * n > total or sum(weights) <= 0.0:
        share = total // n
        return [total - share * (n - 1)] + [share] * (n - 1)
    avail = total - floor * n
    total_w = sum(weights)
    shares = [floor + int(avail * w / total_w) for w in weights]
    shares[0] += total - sum(shares)
    return shares


def plan(stats: VertexStats, total_bytes: int, d: int, min_width: int = 4,
         max_partitions: int = 64, residual_fraction: float = 0.10) -> PartitionPlan:
    """Assign sampled vertices to partitions and carve the byte budget.

    Vertices sort by sampled frequency descending (ties by id ascending);
    the sorted order is greedily split at the contiguous boundary giving
    the largest drop in sum_i sqrt(N_i) (see module docstring), stopping
    when no split improves it, when the partition count would exceed
    max_partitions, or when another partition could no longer keep a
    min_width-wide layer.  Bytes then go to partitions proportionally to
    sqrt(N_i), each keeping a min_width^2-cell floor.
    """
    if not 0 <= residual_fraction < 1:
        raise ValueError(f"residual_fraction must be in [0, 1), got {residual_fraction}")
    residual_bytes = max(int(total_bytes * residual_fraction), COUNTER_BYTES * d)
    data_bytes = total_bytes - residual_bytes
    floor_bytes = COUNTER_BYTES * d * min_width * min_width
    if data_bytes < floor_bytes:
        minimal = floor_bytes + max(int(floor_bytes * residual_fraction / (1 - residual_fraction)) + 1,
                                    COUNTER_BYTES * d)
        raise InfeasibleBudgetError(
            f"{total_bytes} bytes cannot fit a width-{min_width} partition "
            f"plus residual at d={d}", minimal)
    data_cells = data_bytes // (COUNTER_BYTES * d)

    order = sorted(stats.vertices(), key=lambda m: (-stats.freq[m], m))

    # Prefix sums make every contiguous segment's model terms O(1).
    n = len(order)
    pf = [0.0] * (n + 1)   # prefix of f~_v
    pt = [0.0] * (n + 1)   # prefix of d~^2 / f~_v
    pq = [0.0] * (n + 1)   # prefix of d~^2
    for i, m in enumerate(order):
        f, dd = stats.freq[m], stats.out_deg[m]
        pf[i + 1] = pf[i] + f
        pt[i + 1] = pt[i] + dd * dd / f
        pq[i + 1] = pq[i] + dd * dd

    def seg_n(lo: int, hi: int, cell_share: int) -> float:
        rows, _ = _geometry(cell_share, hi - lo)
        return (rows - 1) * (pq[hi] - pq[lo]) + (pf[hi] - pf[lo]) * (pt[hi] - pt[lo])

    leaves: list[tuple[int, int]] = [(0, n)]
    while (len(leaves) < max_partitions
           and data_bytes // (len(leaves) + 1) >= floor_bytes):
        cell_share = data_cells // (len(leaves) + 1)
        best = None   # (gain, leaf index, boundary)
        for idx, (lo, hi) in enumerate(leaves):
            if hi - lo < 2:
                continue
            unsplit = math.sqrt(seg_n(lo, hi, cell_share))
            for t in range(lo + 1, hi):
                gain = (math.sqrt(seg_n(lo, t, cell_share))
                        + math.sqrt(seg_n(t, hi, cell_share)) - unsplit)
                if best is None or gain < best[0]:
                    best = (gain, idx, t)
        if best is None or best[0] >= -_EPS:
            break
        _, idx, t = best
        lo, hi = leaves[idx]
        leaves[idx:idx + 1] = [(lo, t), (t, hi)]

    # Byte shares proportional to sqrt(N_i); one refinement pass because
    # the row cap (and hence N_i) depends on the share itself.
    shares = [data_bytes // len(leaves)] * len(leaves)
    for _ in range(2):
        weights = [math.sqrt(seg_n(lo, hi, s // (COUNTER_BYTES * d)))
                   for (lo, hi), s in zip(leaves, shares)]
        shares = _floored_shares(weights, data_bytes, floor_bytes)

    partitions = []
    assignment: dict[int, int] = {}
    for idx, ((lo, hi), budget) in enumerate(zip(leaves, shares)):
        vs = tuple(order[lo:hi])
        for m in vs:
            assignment[m] = idx
        rows, cols = _geometry(budget // (COUNTER_BYTES * d), hi - lo)
        partitions.append(Partition(
            vertices=vs,
            rows=rows,
            cols=cols,
            n_bytes=budget,
            sampled_freq=int(pf[hi] - pf[lo]),
        ))
    return PartitionPlan(
        partitions=partitions,
        residual_width=math.isqrt(residual_bytes // (COUNTER_BYTES * d)),
        residual_bytes=residual_bytes,
        assignment=assignment,
        d=d,
    )
