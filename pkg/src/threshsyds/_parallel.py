from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """Ordered map; ``jobs > 1`` fans out to worker processes.

    Results come back in input order, so serial and parallel runs agree.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        chunk = max(1, len(items) // (4 * jobs))
        return list(pool.map(fn, items, chunksize=chunk))
