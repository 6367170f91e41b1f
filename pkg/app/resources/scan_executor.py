"""Sharded corpus scanning with deterministic, associative result merging."""

import logging
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import reduce
from typing import TypeVar

from app.resources.config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class ScanExecutorError(Exception):
    """Raised when a scan cannot be scheduled."""

    pass


class ScanExecutor:
    """Runs an analyzer over fixed-size shards and folds the partial results.

    Shards are merged in shard order, so the result is the same for every
    worker count provided merge is associative.
    """

    def __init__(self, jobs: int | None = None, shard_size: int | None = None):
        """Initialize executor.

        Args:
            jobs: Worker processes (0 = all cores, 1 = run inline)
            shard_size: Items per shard
        """
        settings = get_settings()
        jobs = settings.jobs if jobs is None else jobs
        self.jobs = jobs if jobs > 0 else (os.cpu_count() or 1)
        self.shard_size = shard_size or settings.shard_size
        if self.shard_size < 1:
            raise ScanExecutorError(f"shard_size must be >= 1, got {self.shard_size}")

    def shards(self, items: Sequence[T]) -> list[Sequence[T]]:
        return [items[i : i + self.shard_size] for i in range(0, len(items), self.shard_size)]

    def run(
        self,
        items: Sequence[T],
        analyze: Callable[[Sequence[T]], R],
        merge: Callable[[R, R], R],
        empty: R,
    ) -> R:
        """Analyze every shard and fold the results left to right.

        Args:
            items: Work items, usually documents
            analyze: Picklable top-level function mapping a shard to a partial result
            merge: Associative combination of two partial results
            empty: Identity element of merge

        Returns:
            Folded result (empty when there are no items)
        """
        shards = self.shards(items)
        if not shards:
            return empty

        if self.jobs == 1 or len(shards) == 1:
            partials = [analyze(shard) for shard in shards]
        else:
            workers = min(self.jobs, len(shards))
            logger.debug(f"Scanning {len(items)} items in {len(shards)} shards, {workers} workers")
            with ProcessPoolExecutor(max_workers=workers) as pool:
                partials = list(pool.map(analyze, shards))

        return reduce(merge, partials, empty)
