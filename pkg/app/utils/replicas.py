"""
Replica-level seeding and fan-out.

Every replica (or vectorised chunk) draws from its own generator derived from
(seed, index) through numpy's SeedSequence spawn keys, so results depend only
on the base seed and never on the number of workers.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Callable, Iterator, List, Tuple

import numpy as np

from ..config import BATCH_MEMORY_BYTES
from ..errors import ParameterError

logger = logging.getLogger(__name__)


def replica_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for replica `index` under base seed `seed`."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _call(fn: Callable[[np.random.Generator], Any], seed: int, index: int) -> Any:
    return fn(replica_rng(seed, index))


def run_replicas(
    fn: Callable[[np.random.Generator], Any],
    replicas: int,
    seed: int,
    threads: int = 1,
) -> List[Any]:
    """
    Evaluate `fn(rng)` once per replica.

    Args:
        fn: Picklable callable taking a generator (a module-level function or a
            functools.partial of one when threads > 1).
        replicas: Number of replicas.
        seed: Base seed.
        threads: Worker processes; 1 runs in-process.

    Returns:
        Results in replica-index order.
    """
    if replicas < 1:
        raise ParameterError(f"replicas must be >= 1, got {replicas}")
    task = partial(_call, fn, seed)
    if threads <= 1 or replicas == 1:
        return [task(i) for i in range(replicas)]
    logger.debug("Running %d replicas on %d workers", replicas, threads)
    chunksize = max(1, replicas // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(task, range(replicas), chunksize=chunksize))


def chunk_size(bytes_per_replica: int, replicas: int, budget: int = BATCH_MEMORY_BYTES) -> int:
    """Largest chunk of replicas whose working set fits in the memory budget."""
    per = max(int(bytes_per_replica), 1)
    return int(max(1, min(replicas, budget // per)))


def iter_chunks(replicas: int, size: int) -> Iterator[Tuple[int, int]]:
    """Yield (start, stop) bounds covering range(replicas) in blocks of `size`."""
    start = 0
    while start < replicas:
        stop = min(replicas, start + size)
        yield start, stop
        start = stop
