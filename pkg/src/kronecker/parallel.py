"""Deterministic process-pool map."""

from __future__ import annotations

from multiprocessing import get_context
from typing import Callable, Iterable, Sequence


def parallel_map(fn: Callable, items: Sequence, workers: int = 1, chunksize: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a process pool.

    Results come back in input order, so the output does not depend on the
    number of workers or on scheduling.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with get_context("spawn").Pool(processes=min(workers, len(items))) as pool:
        return list(pool.imap(fn, items, chunksize=chunksize))


def index_chunks(n: int, chunk: int) -> Iterable[tuple[int, int]]:
    return [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
