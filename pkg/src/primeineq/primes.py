"""Primes in index order from a segmented sieve of Eratosthenes.

The sieve works on odd numbers only. Each segment holds ``segment_size`` odd
slots; the base primes are extended on demand so a stream can run to any
limit below the configured cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from . import kernels
from .constants import DEFAULT_SEGMENT_SIZE, DEFAULT_SIEVE_CAP, UINT64_LIMIT

__all__ = [
    "PrimeCheckpoint",
    "PrimeStream",
    "ResourceLimitError",
    "nth_prime",
    "primes_list",
    "stream_primes",
    "upper_bound_for_nth_prime",
]


class ResourceLimitError(RuntimeError):
    """The sieve would have to go past the configured bound."""


@dataclass(frozen=True)
class PrimeCheckpoint:
    """``p_k`` is the k-th prime (1-based)."""

    k: int
    p_k: int


def _small_primes(limit: int) -> list[int]:
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


def upper_bound_for_nth_prime(n: int) -> int:
    """A sieve bound that is expected to reach ``p_n``.

    Uses p_n < n(log n + log log n) (Rosser's bound, n >= 6) plus a small
    margin. Callers must not rely on it: the stream extends past it when it
    falls short.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n < 6:
        return 13
    logn = math.log(n)
    return int(n * (logn + math.log(logn))) + 16


class PrimeStream:
    """Sequential ``(k, p_k)`` pairs.

    Parameters
    ----------
    segment_size:
        Odd slots per sieve window. Only affects speed.
    start:
        Resume after this checkpoint; the first emitted pair is
        ``(start.k + 1, p_{start.k + 1})``.
    max_bound:
        Largest integer the sieve may examine.

    The stream is a single-consumer iterator.
    """

    def __init__(
        self,
        segment_size: int = DEFAULT_SEGMENT_SIZE,
        start: PrimeCheckpoint | None = None,
        max_bound: int = DEFAULT_SIEVE_CAP,
    ):
        if segment_size < 1:
            raise ValueError("segment_size must be positive")
        if max_bound >= UINT64_LIMIT:
            raise ResourceLimitError("sieve cap must stay below 2^64")
        self.segment_size = segment_size
        self.max_bound = max_bound
        self.base_primes: list[int] = []
        self._base_limit = 1
        self._buffer: list[int] = []
        self._pos = 0
        if start is None:
            self.next_index = 1
            self.segment_base = 3
            self._emit_two = True
        else:
            if start.k < 1 or start.p_k < 2:
                raise ValueError(f"invalid checkpoint {start}")
            self.next_index = start.k + 1
            self.segment_base = start.p_k + 2 if start.p_k > 2 else 3
            self._emit_two = False

    @classmethod
    def from_checkpoint(cls, k: int, p_k: int, **kwargs) -> "PrimeStream":
        return cls(start=PrimeCheckpoint(k, p_k), **kwargs)

    def checkpoint(self) -> PrimeCheckpoint | None:
        """Position of the last emitted pair, or None before the first."""
        if self.next_index == 1:
            return None
        return PrimeCheckpoint(self.next_index - 1, self._last)

    def _ensure_base(self, top: int) -> None:
        root = math.isqrt(top) + 1
        if root <= self._base_limit:
            return
        new_limit = max(root, 2 * self._base_limit)
        self.base_primes = _small_primes(new_limit)[1:]  # odd primes only
        self._base_limit = new_limit

    def _fill(self) -> None:
        low = self.segment_base
        count = self.segment_size
        top = low + 2 * count
        if top > self.max_bound:
            if low > self.max_bound:
                raise ResourceLimitError(
                    f"sieve would pass the cap {self.max_bound} "
                    f"(next index {self.next_index})"
                )
            count = (self.max_bound - low) // 2 + 1
            top = low + 2 * count
        self._ensure_base(top)
        self._buffer = kernels.sieve_segment(low, count, self.base_primes)
        self._pos = 0
        self.segment_base = top

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return self

    def __next__(self) -> tuple[int, int]:
        if self._emit_two:
            self._emit_two = False
            return self._emit(2)
        while self._pos >= len(self._buffer):
            self._fill()
        p = self._buffer[self._pos]
        self._pos += 1
        return self._emit(p)

    def _emit(self, p: int) -> tuple[int, int]:
        k = self.next_index
        self.next_index += 1
        self._last = p
        return k, p

    def take(self, count: int) -> list[int]:
        """The next ``count`` primes as a list; their indices continue from
        ``next_index``."""
        out: list[int] = []
        if count <= 0:
            return out
        if self._emit_two:
            self._emit_two = False
            out.append(2)
        while len(out) < count:
            if self._pos >= len(self._buffer):
                self._fill()
            need = count - len(out)
            chunk = self._buffer[self._pos : self._pos + need]
            self._pos += len(chunk)
            out.extend(chunk)
        self.next_index += len(out)
        self._last = out[-1]
        return out


def stream_primes(
    limit_index: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    max_bound: int = DEFAULT_SIEVE_CAP,
) -> Iterator[tuple[int, int]]:
    """Yield ``(k, p_k)`` for k = 1..limit_index.

    Raises :class:`ResourceLimitError` up front if the estimated sieve bound
    already exceeds ``max_bound``.
    """
    if limit_index < 1:
        raise ValueError(f"limit_index must be >= 1, got {limit_index}")
    if upper_bound_for_nth_prime(limit_index) > max_bound:
        raise ResourceLimitError(
            f"p_{limit_index} is expected beyond the sieve cap {max_bound}"
        )
    stream = PrimeStream(segment_size=segment_size, max_bound=max_bound)
    for _ in range(limit_index):
        yield next(stream)


def primes_list(count: int, **kwargs) -> list[int]:
    """``[p_1, ..., p_count]``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    max_bound = kwargs.get("max_bound", DEFAULT_SIEVE_CAP)
    if count and upper_bound_for_nth_prime(count) > max_bound:
        raise ResourceLimitError(
            f"p_{count} is expected beyond the sieve cap {max_bound}"
        )
    return PrimeStream(**kwargs).take(count)


def nth_prime(n: int, **kwargs) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return primes_list(n, **kwargs)[-1]
