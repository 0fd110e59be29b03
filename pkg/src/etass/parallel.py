"""Optional thread pool for per-column page work.

Worker count comes from the ETASS_THREADS environment variable; the
default of 1 keeps everything sequential.  Page values are immutable and
per-column jobs only read shared state, so results are identical at any
worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get("ETASS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def tmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map preserving order, threaded when ETASS_THREADS > 1."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
