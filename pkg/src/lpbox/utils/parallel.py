"""
Ordered thread-pool map for the --threads option.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: int) -> int:
    """0 means one thread per CPU."""
    if threads < 0:
        raise ValueError(f"Thread count must be non-negative, got {threads}.")
    return threads or (os.cpu_count() or 1)


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Applies `func` to every item and returns results in input order, so
    reductions over the result are independent of scheduling.
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
