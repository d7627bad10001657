"""Process fan-out with results in submission order."""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar('T')
R = TypeVar('R')


def ordered_map(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """
    Apply func to every item, in worker processes when jobs > 1.

    func must be a module-level function so it pickles. Results come back in
    the order of items whatever the scheduling, so reductions over them are
    deterministic.

    Args:
        func: Picklable callable
        items: Work items
        jobs: Worker process count (1 runs in-process)

    Returns:
        List of results aligned with items
    """
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [func(item) for item in items]
    workers = min(jobs, len(items))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))
