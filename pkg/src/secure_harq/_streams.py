"""Deterministic random substreams and chunked parallel execution.

Every chunk of work draws from its own generator keyed by
``(seed, domain, link, chunk)``.  Chunk boundaries are fixed by
:data:`CHUNK_SIZE`, never by the worker count, so results are bit-identical
for any value of ``SHRQ_THREADS``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")

CHUNK_SIZE = 1 << 16

# domains keep table draws and session draws statistically independent
DOMAIN_TABLES = 0
DOMAIN_SESSIONS = 1

LINK_MAIN = 0
LINK_EVE = 1


def substream(seed: int, domain: int, link: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=(domain, link, chunk))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_bounds(total: int, chunk_size: int = CHUNK_SIZE) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk_size, total)) for lo in range(0, total, chunk_size)]


def worker_count() -> int:
    """Number of worker threads; ``SHRQ_THREADS`` overrides the CPU count."""
    cpus = os.cpu_count() or 1
    raw = os.environ.get("SHRQ_THREADS", "").strip()
    if not raw:
        return cpus
    try:
        cap = int(raw)
    except ValueError:
        return cpus
    return max(1, cap)


def ordered_map(fn: Callable[..., T], items: Iterable) -> list[T]:
    """Apply ``fn`` to every item, possibly in parallel, preserving order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
