"""Order-preserving process-pool map used by the enumerators."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    env = os.environ.get("THREADS")
    if env and env.isdigit() and int(env) > 0:
        return int(env)
    return 1


def _run_chunk(args):
    func, chunk = args
    return [func(x) for x in chunk]


def pmap(func: Callable[[T], R], items: Sequence[T], workers: int | None = None) -> list[R]:
    """``[func(x) for x in items]``, optionally spread over worker processes.

    Results come back in input order whatever the worker count, so callers
    that merge them get identical output at every degree of parallelism.
    """
    items = list(items)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    n = min(workers, len(items))
    size = -(-len(items) // (4 * n))
    chunks = [items[i:i + size] for i in range(0, len(items), size)]
    out: list[R] = []
    with ProcessPoolExecutor(max_workers=n) as ex:
        for part in ex.map(_run_chunk, [(func, c) for c in chunks]):
            out.extend(part)
    return out
