"""Deterministic work splitting.

Heavy loops (pair scans, candidate evaluations, simulation batches) are cut
into fixed-size chunks whose boundaries never depend on the worker count.
Results are reduced in chunk order, so any worker count yields bit-identical
output.
"""

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import ValidationError

WORKERS_ENV = "LDSFORGE_WORKERS"


def resolve_workers(workers=None):
    """Pick the worker count: explicit argument, else LDSFORGE_WORKERS, else 1."""
    if workers is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ValidationError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    workers = int(workers)
    if workers < 1:
        raise ValidationError(f"worker count must be >= 1, got {workers}")
    return workers


def map_tasks(fn, tasks, workers=1):
    """Apply fn to each task, returning results in task order.

    With workers > 1 the tasks run in a process pool; ordering of the returned
    list is unaffected, so reductions downstream stay deterministic.
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))
