"""Deterministic thread-pool helper honoring the ZII_THREADS env variable.

ZII_THREADS unset or "1" runs sequentially; "0" means auto (capped at 4);
any other positive integer is used as given.  Results always come back in
input order, so output bytes never depend on the thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("ZII_THREADS", "1").strip()
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n < 0:
        return 1
    if n == 0:
        return min(4, os.cpu_count() or 1)
    return n


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    seq: Sequence[T] = list(items)
    n = thread_count()
    if n <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, seq))
