"""Order-preserving map honouring the VLAX_THREADS cap."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def max_workers() -> int:
    raw = os.environ.get("VLAX_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"VLAX_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"VLAX_THREADS must be a positive integer, got {raw!r}")
    return n


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    items = list(items)
    n = min(max_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
