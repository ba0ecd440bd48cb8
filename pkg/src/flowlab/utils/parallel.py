"""Ordered parallel evaluation of per-index terms."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from flowlab import config

T = TypeVar("T")
R = TypeVar("R")


def evaluate_terms(
    fn: Callable[[T], R],
    items: Sequence[T],
    threads: Optional[int] = None,
) -> List[R]:
    """Apply ``fn`` to every item and return the results in input order.

    Args:
        fn: Pure function evaluated once per item
        items: Items to evaluate
        threads: Worker cap (defaults to FLOWLAB_THREADS)

    Returns:
        List of results aligned with ``items``
    """
    workers = config.THREADS if threads is None else max(1, threads)
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
