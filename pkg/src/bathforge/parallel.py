"""Thread-pool helper for embarrassingly parallel parameter sweeps.

The BATHFORGE_THREADS environment variable caps the worker count; unset or
"1" runs serially (the numerical kernels are numpy-vectorized, so threads
mostly help when many independent trace points are requested).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "parallel_map"]


def thread_count() -> int:
    raw = os.environ.get("BATHFORGE_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            return 1
        return max(1, n)
    return min(4, os.cpu_count() or 1)


def parallel_map(fn, items):
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
