"""Backend selection: compiled extension if available, numpy fallback otherwise.

Both backends expose the same functions (hash_buckets, cm_update, cm_query,
mx_update, mx_query) and the same PRIME; results are bit-identical.  Set
KMATRIX_FORCE_PY=1 to skip the compiled extension (useful for debugging
and for benchmarking the fallback).
"""

import os

if os.environ.get("KMATRIX_FORCE_PY"):
    _use_ext = False
else:
    try:
        import kmatrix._kernels  # noqa: F401
        _use_ext = True
    except ImportError:  # pragma: no cover - exercised when the ext is absent
        _use_ext = False

if _use_ext:
    from kmatrix._kernels import (  # noqa: F401
        BACKEND,
        PRIME,
        cm_query,
        cm_update,
        hash_buckets,
        mx_query,
        mx_update,
    )
else:
    from kmatrix._kernels_py import (  # noqa: F401
        BACKEND,
        PRIME,
        cm_query,
        cm_update,
        hash_buckets,
        mx_query,
        mx_update,
    )
