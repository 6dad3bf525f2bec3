"""Memory cache for hot-path buffers.

Requests are served from the smallest free buffer whose capacity covers the
request; only when none fits is a new buffer allocated. Released buffers go
back to the free list. Nothing is ever trimmed.
"""

from __future__ import annotations

import bisect
import itertools
import threading
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PoolError


@dataclass
class PoolStats:
    allocations: int = 0
    reuses: int = 0
    releases: int = 0

    def as_dict(self) -> dict:
        return {"allocations": self.allocations, "reuses": self.reuses, "releases": self.releases}


class PooledBuffer:
    """A flat uint64 buffer owned by a :class:`BufferPool`."""

    __slots__ = ("data", "pool", "_lent")

    def __init__(self, capacity: int, pool: "BufferPool", dtype):
        self.data = np.empty(capacity, dtype=dtype)
        self.pool = pool
        self._lent = False

    @property
    def capacity(self) -> int:
        return self.data.size

    def view(self, shape) -> np.ndarray:
        size = int(np.prod(shape))
        if size > self.capacity:
            raise ParameterError(f"shape {shape} exceeds buffer capacity {self.capacity}")
        return self.data[:size].reshape(shape)

    def release(self) -> None:
        self.pool.release(self)


class BufferPool:
    def __init__(self, dtype=np.uint64):
        self.dtype = np.dtype(dtype)
        self.stats = PoolStats()
        self._free: list[tuple[int, int, PooledBuffer]] = []  # (capacity, seq, buffer)
        self._seq = itertools.count()
        self._lent: set[int] = set()
        self._total = 0
        self._lock = threading.Lock()

    def acquire(self, size: int) -> PooledBuffer:
        """Best-fit reuse; ties go to the buffer released first. Contents are stale."""
        size = int(size)
        if size <= 0:
            raise ParameterError("buffer size must be positive")
        with self._lock:
            i = bisect.bisect_left(self._free, (size, -1))
            if i < len(self._free):
                _, _, buf = self._free.pop(i)
                self.stats.reuses += 1
            else:
                buf = PooledBuffer(size, self, self.dtype)
                self.stats.allocations += 1
                self._total += 1
            buf._lent = True
            self._lent.add(id(buf))
            return buf

    def release(self, buf: PooledBuffer) -> None:
        with self._lock:
            if buf.pool is not self or id(buf) not in self._lent:
                raise PoolError("buffer released twice or to a foreign pool")
            self._lent.discard(id(buf))
            buf._lent = False
            bisect.insort(self._free, (buf.capacity, next(self._seq), buf))
            self.stats.releases += 1

    def empty(self, shape) -> tuple[np.ndarray, PooledBuffer]:
        """Array view of the given shape backed by a pooled buffer."""
        buf = self.acquire(int(np.prod(shape)))
        return buf.view(shape), buf

    @property
    def free_count(self) -> int:
        return len(self._free)

    @property
    def lent_count(self) -> int:
        return len(self._lent)

    @property
    def total(self) -> int:
        return self._total
