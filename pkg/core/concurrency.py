"""Ordered fan-out of pure work items over a capped thread pool."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from django.conf import settings

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def worker_count() -> int:
    return max(1, int(getattr(settings, 'MW_THREADS', 1)))


def parallel_map(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[func(x) for x in items]``, run on at most MW_THREADS workers.

    Results keep input order so callers stay deterministic.
    """
    work = list(items)
    workers = min(worker_count(), len(work))
    if workers <= 1:
        return [func(item) for item in work]
    logger.debug('parallel_map: %d items on %d workers', len(work), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, work))
