from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

THREADS_ENVKEY = "QCORR_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def max_workers(requested: Optional[int] = None) -> int:
    """
    Resolves the worker count for a sweep. The ``QCORR_THREADS`` environment variable caps whatever is requested

    :param requested: Worker count the caller asked for, or None for the CPU count
    :return: Number of workers to use, at least 1
    """
    count = requested or os.cpu_count() or 1
    env_value = os.environ.get(THREADS_ENVKEY, "").strip()
    if env_value:
        try:
            count = min(count, int(env_value))
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENVKEY}={env_value!r}")
    return max(1, count)


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Applies ``func`` to every item on a thread pool.
    Results are ordered by input index regardless of completion order; the first raised exception propagates

    :param func: Pure function to apply
    :param items: Inputs
    :param workers: Optional requested worker count
    :return: List of results in input order
    """
    items = list(items)
    n_workers = min(max_workers(workers), max(1, len(items)))
    if n_workers == 1:
        return [func(i) for i in items]
    logger.debug(f"Fanning out {len(items)} tasks to {n_workers} workers")
    with ThreadPoolExecutor(max_workers=n_workers, thread_name_prefix="qcorr") as pool:
        return list(pool.map(func, items))
