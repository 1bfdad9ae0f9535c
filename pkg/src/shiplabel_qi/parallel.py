"""Ordered data-parallel map over independent work items."""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from shiplabel_qi.core.errors import ConfigError

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "SLQI_THREADS"


def worker_count() -> int:
    """Worker cap from SLQI_THREADS (default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if count < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {count}")
    return count


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """
    Apply fn to every item, returning results in input order.

    Runs inline with one worker, otherwise on a thread pool. Results never
    depend on the worker count.
    """
    workers = worker_count() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
