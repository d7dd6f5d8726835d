"""Compare the compiled and pure-numpy kernel backends.

Usage: python benchmarks/kernel_speed.py [n_edges]

Times the three hot paths (bucket hashing, CountMin update, matrix
update) plus a full end-to-end gMatrix build on a synthetic stream.
Run under KMATRIX_FORCE_PY=1 to confirm the fallback is selected; this
script imports both backend modules directly so a single run prints the
comparison.
"""

import sys
import time

import numpy as np

from kmatrix import _kernels_py as kpy

try:
    from kmatrix import _kernels as kext
except ImportError:
    kext = None

PRIME = kpy.PRIME


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    d, w = 7, 256
    rng = np.random.default_rng(0)
    a = rng.integers(1, PRIME, d, dtype=np.uint64)
    b = rng.integers(0, PRIME, d, dtype=np.uint64)
    keys = rng.integers(0, 1 << 62, n, dtype=np.uint64)
    src = rng.integers(0, 100_000, n).astype(np.uint64)
    dst = rng.integers(0, 100_000, n).astype(np.uint64)

    backends = [("python", kpy)] + ([("compiled", kext)] if kext else [])
    print(f"{n} edges, d={d}, w={w}")
    header = f"{'kernel':<12}" + "".join(f"{name:>12}" for name, _ in backends)
    if kext:
        header += f"{'speedup':>10}"
    print(header)

    cases = [
        ("hash", lambda k: k.hash_buckets(a, b, w, keys)),
        ("cm_update", lambda k: k.cm_update(np.zeros((d, w * w), dtype=np.uint32), a, b, keys)),
        ("mx_update", lambda k: k.mx_update(np.zeros((d, w, w), dtype=np.uint32),
                                            a, b, a, b, src, dst)),
        ("mx_query", lambda k: k.mx_query(np.zeros((d, w, w), dtype=np.uint32),
                                          a, b, a, b, src, dst)),
    ]
    for name, fn in cases:
        times = [timeit(lambda k=kernel: fn(k)) for _, kernel in backends]
        line = f"{name:<12}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
