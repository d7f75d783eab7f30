import logging
from multiprocessing import Pool
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_jobs(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """Order-preserving map, spread over `jobs` worker processes when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [func(item) for item in items]
    processes = min(jobs, len(items))
    logger.debug(f"Mapping {len(items)} items over {processes} processes")
    with Pool(processes=processes) as pool:
        return pool.map(func, items)
