"""Segmented sieves for the Moebius and von Mangoldt functions.

Both sieves operate on half-open integer windows ``[lo, hi)`` so arbitrarily
large ranges can be processed in fixed memory.  The Moebius sieve returns a
dense int8 array of mu values; the von Mangoldt sieve returns the prime
powers in the window symbolically as ``(n, p, k)`` triples, so callers can
attach log enclosures at whatever rigor level they need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DEFAULT_SEGMENT",
    "Segment",
    "MobiusBlock",
    "MangoldtBlock",
    "base_primes",
    "sieve_mobius",
    "sieve_mangoldt",
    "segments",
]

DEFAULT_SEGMENT = 1 << 22


@dataclass(frozen=True, slots=True)
class Segment:
    """Half-open window ``[lo, hi)`` of positive integers."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo < 1 or self.hi < self.lo:
            raise ValueError(f"bad segment [{self.lo}, {self.hi})")

    def __len__(self) -> int:
        return self.hi - self.lo


@dataclass(frozen=True, slots=True)
class MobiusBlock:
    segment: Segment
    mu: np.ndarray  # int8, mu[i] = mu(segment.lo + i)


@dataclass(frozen=True, slots=True)
class MangoldtBlock:
    segment: Segment
    # Sorted arrays of equal length: n = p**k lies in the segment.
    n: np.ndarray  # int64
    p: np.ndarray  # int64
    k: np.ndarray  # int64


@lru_cache(maxsize=8)
def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit, as an int64 array (plain sieve of Eratosthenes)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _check_base(primes: np.ndarray, hi: int) -> None:
    need = math.isqrt(hi - 1) if hi > 1 else 1
    if need < 2:
        return
    top = base_primes(need)[-1]
    if primes.size == 0 or int(primes[-1]) < int(top):
        raise ValueError(
            f"insufficient base primes: need all primes up to {need}, "
            f"largest supplied is {int(primes[-1]) if primes.size else 0}"
        )


def sieve_mobius(segment: Segment, primes: np.ndarray | None = None) -> MobiusBlock:
    """Dense Moebius values on a segment.

    Standard segmented factorization sieve: divide out each base prime while
    flipping signs, kill squares, then any residual cofactor > 1 is a single
    large prime and flips the sign once more.
    """
    lo, hi = segment.lo, segment.hi
    if primes is None:
        primes = base_primes(max(math.isqrt(max(hi - 1, 1)), 2))
    _check_base(primes, hi)
    size = hi - lo
    mu = np.ones(size, dtype=np.int8)
    rem = np.arange(lo, hi, dtype=np.int64)
    limit = math.isqrt(hi - 1) if hi > 1 else 1
    for p in primes:
        p = int(p)
        if p > limit:
            break
        start = (-lo) % p
        mu[start::p] *= -1
        rem[start::p] //= p
        p2 = p * p
        start2 = (-lo) % p2
        mu[start2::p2] = 0
        sl = rem[start2::p2]
        np.floor_divide(sl, p, out=sl, where=sl % p == 0)
    mu[rem > 1] *= -1
    if lo == 1:
        mu[0] = 1
    return MobiusBlock(segment, mu)


def sieve_mangoldt(segment: Segment, primes: np.ndarray | None = None) -> MangoldtBlock:
    """Prime powers in a segment, as sorted ``(n, p, k)`` triples."""
    lo, hi = segment.lo, segment.hi
    if primes is None:
        primes = base_primes(max(math.isqrt(max(hi - 1, 1)), 2))
    _check_base(primes, hi)
    size = hi - lo
    is_prime = np.ones(size, dtype=bool)
    if lo == 1:
        is_prime[0] = False
    limit = math.isqrt(hi - 1) if hi > 1 else 1
    for p in primes:
        p = int(p)
        if p > limit:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        is_prime[start - lo :: p] = False
    idx = np.flatnonzero(is_prime)
    ns = [idx.astype(np.int64) + lo]
    ps = [idx.astype(np.int64) + lo]
    ks = [np.ones(idx.size, dtype=np.int64)]
    # Higher powers come only from primes <= sqrt(hi).
    for p in primes:
        p = int(p)
        if p > limit:
            break
        q = p * p
        k = 2
        while q < hi:
            if q >= lo:
                ns.append(np.array([q], dtype=np.int64))
                ps.append(np.array([p], dtype=np.int64))
                ks.append(np.array([k], dtype=np.int64))
            q *= p
            k += 1
    n = np.concatenate(ns)
    p_arr = np.concatenate(ps)
    k_arr = np.concatenate(ks)
    order = np.argsort(n, kind="stable")
    return MangoldtBlock(segment, n[order], p_arr[order], k_arr[order])


def segments(lo: int, hi: int, size: int = DEFAULT_SEGMENT):
    """Yield ``Segment`` windows covering ``[lo, hi)`` in order."""
    if size < 1:
        raise ValueError("segment size must be positive")
    a = lo
    while a < hi:
        b = min(a + size, hi)
        yield Segment(a, b)
        a = b
