"""Fixed-block work partitioning shared by every parallel step.

Block boundaries depend only on the problem size, never on the worker
count, so results (floating-point sums included) are identical for any
number of threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

BLOCK = 4096


def blocks(n: int, size: int = BLOCK) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def blocked_sum(values: np.ndarray, size: int = BLOCK) -> float:
    """Sum in fixed blocks, then combine block totals left to right."""
    if len(values) == 0:
        return 0.0
    starts = np.arange(0, len(values), size)
    partial = np.add.reduceat(np.asarray(values, dtype=np.float64), starts)
    total = 0.0
    for p in partial.tolist():
        total += p
    return total


class Workers:
    """Thin thread pool that always returns results in block order."""

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.threads = threads
        self._pool = ThreadPoolExecutor(threads) if threads > 1 else None

    def map(self, fn: Callable[[int, int], T], spans: Sequence[tuple[int, int]]) -> list[T]:
        if self._pool is None or len(spans) < 2:
            return [fn(lo, hi) for lo, hi in spans]
        return list(self._pool.map(lambda s: fn(*s), spans))

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self) -> "Workers":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
