"""Order-preserving map over a process pool"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional

logger = logging.getLogger(__name__)


def ordered_map(func: Callable, items: Iterable, workers: int = 1,
                initializer: Optional[Callable] = None, initargs: tuple = ()) -> List:
    """[func(item) for item in items], fanned out when workers > 1.

    Results come back in input order whatever the completion order. With one
    worker the initializer still runs, in-process, so module-level state set
    by it is visible to func either way.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    logger.debug(f"mapping {len(items)} items over {workers} processes (chunks of {chunksize})")
    with ProcessPoolExecutor(max_workers=workers, initializer=initializer, initargs=initargs) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
