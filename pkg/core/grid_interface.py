import asyncio
import threading

from typing import (
    Any,
    Callable,
    List,
    Optional,
    Sequence
)

import offdiag.writer


# helper methods

def async_join_threads(threads: List[threading.Thread], timeout: Optional[float] = None) -> List[threading.Thread]:
    """ Joins all threads concurrently; returns the ones still alive. """
    loop = asyncio.new_event_loop()
    async def join_one(th):
        await loop.run_in_executor(None, th.join, timeout)
    async def join_all():
        await asyncio.gather(*[
            join_one(th) for th in threads
        ], return_exceptions=True)
    try:
        loop.run_until_complete(join_all())
    finally:
        loop.close()
    return [th for th in threads if th.is_alive()]


def split_indices(count: int, workers: int) -> List[range]:
    """ Strided index sets, one per worker; empty sets are dropped. """
    workers = max(1, min(workers, count))
    return [range(k, count, workers) for k in range(workers)]



# grid evaluation

def evaluate_grid(func: Callable[[float], Any], values: Sequence[float], workers: int = 1) -> List[Any]:
    """
    Applies :attr:`func` to every grid value on :attr:`workers` threads. The
    results come back in grid order whatever the scheduling; the first
    exception raised by any worker is re-raised here.
    """
    values = [float(x) for x in values]
    results: List[Any] = [None] * len(values)
    if not values: return results
    if workers <= 1 or len(values) == 1:
        return [func(x) for x in values]

    lock = threading.Lock()
    failures: List[BaseException] = []

    def work(indices: range):
        for i in indices:
            with lock:
                if failures: return
            try:
                out = func(values[i])
            except BaseException as e:
                with lock: failures.append(e)
                return
            with lock: results[i] = out

    threads = [
        threading.Thread(target=work, args=(indices,), name=f'offdiag-grid-{k}', daemon=True)
        for k, indices in enumerate(split_indices(len(values), workers))
    ]
    offdiag.writer.debug(f"evaluating {len(values)} grid points on {len(threads)} threads")
    for th in threads: th.start()
    alive = async_join_threads(threads)
    if alive:
        offdiag.writer.warn(f"{len(alive)} grid threads did not finish")
    if failures:
        raise failures[0]
    return results
