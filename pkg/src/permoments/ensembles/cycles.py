"""Cycle types of S_n and the sub-permanent polynomials of I + P for a cycle."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from ..arith import factorial
from .kernel import poly_mul_trunc, subpermanent_poly


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n as non-increasing tuples, reverse-lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in partitions(n - part, part):
            yield (part,) + rest


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    return sum(1 for _ in partitions(n))


@dataclass(frozen=True)
class CycleType:
    partition: tuple[int, ...]
    class_size: int

    @classmethod
    def of(cls, partition: tuple[int, ...]) -> CycleType:
        denom = 1
        for j, c in Counter(partition).items():
            denom *= j**c * factorial(c)
        return cls(tuple(partition), factorial(sum(partition)) // denom)

    def representative(self) -> list[int]:
        """A permutation (one-line, 0-based) with consecutive cycles."""
        perm = []
        start = 0
        for L in self.partition:
            perm.extend(start + (k + 1) % L for k in range(L))
            start += L
        return perm


def cycle_types(n: int) -> list[CycleType]:
    return [CycleType.of(p) for p in partitions(n)]


def cycle_type_of(perm) -> tuple[int, ...]:
    seen = [False] * len(perm)
    lengths = []
    for s in range(len(perm)):
        if not seen[s]:
            L = 0
            x = s
            while not seen[x]:
                seen[x] = True
                x = perm[x]
                L += 1
            lengths.append(L)
    return tuple(sorted(lengths, reverse=True))


@lru_cache(maxsize=None)
def cycle_block_poly(L: int, mmax: int) -> tuple[int, ...]:
    """Sub-permanent polynomial of I_L + P where P is an L-cycle."""
    block = [[0] * L for _ in range(L)]
    for i in range(L):
        block[i][i] += 1
        block[i][(i + 1) % L] += 1
    return tuple(subpermanent_poly(block, min(mmax, L), split=False)) + (0,) * max(0, mmax - L)


def identity_plus_poly(partition: tuple[int, ...], mmax: int) -> list[int]:
    """Sub-permanent polynomial of I + P_sigma for sigma of the given cycle type."""
    out = [1] + [0] * mmax
    for L in partition:
        out = poly_mul_trunc(out, cycle_block_poly(L, mmax), mmax)
    return out
