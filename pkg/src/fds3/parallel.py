"""Optional thread parallelism with deterministic result order."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "FDS3_MAX_WORKERS"


def max_workers() -> int:
    raw = os.environ.get(ENV_VAR, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[fn(x) for x in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    workers = max_workers()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
