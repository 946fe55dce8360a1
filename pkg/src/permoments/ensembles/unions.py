"""Exact moments of perm_{m1} * perm_{m2} by expanding over matching unions.

A term of perm_{m1}(A) * perm_{m2}(A) is a pair (M1, M2) of partial matchings
of sizes m1, m2 between rows and columns. Their union splits into connected
pieces of three kinds:

* a shared position (in both M1 and M2),
* an alternating path of l >= 1 positions,
* an alternating cycle of 2l >= 4 positions.

The expectation of the product of entries factors over the pieces once the
color (permutation) of every position is fixed, and only depends on how many
rows and columns the configuration occupies. The number of placements of a
configuration using R rows and C columns is (n)_R (n)_C divided by the
symmetry factor, so the whole sum is the exponential of the sum over single
pieces, read off at (m1, m2).

Under E1, the r colors of a configuration must form a proper coloring (two
positions sharing a row or column never come from the same permutation); the
probability that permutation c contains s_c given positions is 1/(n)_{s_c}.
A shared position contributes A_e^2 = sum_c P_c[e] + sum_{c != c'} P_c[e] P_c'[e].

Under E_B, entries are 0/1, so a configuration with d distinct positions has
expectation p^d.

The piece tables are independent of n; evaluation at many n is cheap.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from ..arith import falling


@dataclass(frozen=True)
class Piece:
    kind: str  # "shared" | "path" | "cycle"
    length: int  # number of distinct positions
    a: int  # positions from M1
    b: int  # positions from M2
    rows: int
    cols: int
    symmetry: int


def pieces(m1: int, m2: int) -> list[Piece]:
    out = [Piece("shared", 1, 1, 1, 1, 1, 1)]
    for length in range(1, m1 + m2 + 1):
        h = (length + 1) // 2
        if length % 2:
            # one row end, one column end; first position from M1 or from M2
            out.append(Piece("path", length, h, length - h, h, h, 1))
            out.append(Piece("path", length, length - h, h, h, h, 1))
        else:
            # both ends on rows, or both on columns
            out.append(Piece("path", length, h, h, h + 1, h, 1))
            out.append(Piece("path", length, h, h, h, h + 1, 1))
    for half in range(2, min(m1, m2) + 1):
        out.append(Piece("cycle", 2 * half, half, half, half, half, half))
    return [p for p in out if p.a <= m1 and p.b <= m2]


def _proper_colorings(length: int, r: int, closed: bool) -> dict[tuple[int, ...], int]:
    """Count proper colorings of a path (or cycle) by color-count vector."""
    zero = (0,) * r
    if closed:
        total: dict[tuple[int, ...], int] = defaultdict(int)
        for first in range(r):
            states = {(first, _bump(zero, first)): 1}
            for _ in range(length - 1):
                states = _extend(states, r)
            for (last, s), cnt in states.items():
                if last != first:
                    total[s] += cnt
        return dict(total)
    states = {(c, _bump(zero, c)): 1 for c in range(r)}
    for _ in range(length - 1):
        states = _extend(states, r)
    total = defaultdict(int)
    for (_, s), cnt in states.items():
        total[s] += cnt
    return dict(total)


def _bump(s: tuple[int, ...], c: int, by: int = 1) -> tuple[int, ...]:
    return s[:c] + (s[c] + by,) + s[c + 1 :]


def _extend(states, r):
    nxt: dict = defaultdict(int)
    for (last, s), cnt in states.items():
        for c in range(r):
            if c != last:
                nxt[(c, _bump(s, c))] += cnt
    return nxt


def e1_piece_weight(piece: Piece, r: int) -> dict[tuple[int, ...], int]:
    if piece.kind == "shared":
        zero = (0,) * r
        w: dict[tuple[int, ...], int] = defaultdict(int)
        for c in range(r):
            w[_bump(zero, c)] += 1
            for c2 in range(r):
                if c2 != c:
                    w[_bump(_bump(zero, c), c2)] += 1
        return dict(w)
    return _proper_colorings(piece.length, r, closed=piece.kind == "cycle")


def eb_piece_weight(piece: Piece) -> dict[tuple[int, ...], int]:
    return {(piece.length,): 1}


Table = dict[tuple[int, int, tuple[int, ...]], Fraction]


def _exp_table(m1: int, m2: int, weight: Callable[[Piece], dict], key_len: int) -> Table:
    """Coefficient of (m1, m2) in exp(sum of pieces), keyed by (R, C, key)."""
    single: dict = defaultdict(Fraction)
    for p in pieces(m1, m2):
        for key, cnt in weight(p).items():
            single[(p.a, p.b, p.rows, p.cols, key)] += Fraction(cnt, p.symmetry)
    zero_key = (0,) * key_len
    total: dict = defaultdict(Fraction)
    total[(0, 0, 0, 0, zero_key)] = Fraction(1)
    power = dict(total)
    k = 0
    while power:
        k += 1
        nxt: dict = defaultdict(Fraction)
        for (a, b, R, C, s), x in power.items():
            for (a2, b2, R2, C2, s2), y in single.items():
                if a + a2 > m1 or b + b2 > m2:
                    continue
                key = (a + a2, b + b2, R + R2, C + C2, tuple(u + v for u, v in zip(s, s2)))
                nxt[key] += x * y
        power = {key: v / k for key, v in nxt.items() if v}
        for key, v in power.items():
            total[key] += v
    return {(R, C, s): v for (a, b, R, C, s), v in total.items() if a == m1 and b == m2}


@lru_cache(maxsize=None)
def e1_table(m1: int, m2: int, r: int) -> Table:
    m1, m2 = max(m1, m2), min(m1, m2)
    return _exp_table(m1, m2, lambda p: e1_piece_weight(p, r), r)


@lru_cache(maxsize=None)
def eb_table(m1: int, m2: int) -> Table:
    m1, m2 = max(m1, m2), min(m1, m2)
    return _exp_table(m1, m2, eb_piece_weight, 1)


def e1_union_moment(n: int, r: int, m1: int, m2: int = 0) -> Fraction:
    """E1(perm_{m1} perm_{m2}) for the sum of r uniform permutation matrices."""
    if r < 1 or m1 < 0 or m2 < 0:
        raise ValueError("need r >= 1 and m >= 0")
    total = Fraction(0)
    for (R, C, s), coeff in e1_table(m1, m2, r).items():
        if R > n or C > n:
            continue
        den = 1
        for sc in s:
            den *= falling(n, sc)
        total += coeff * falling(n, R) * falling(n, C) / den
    return total


def eb_union_moment(n: int, r: int, m1: int, m2: int = 0) -> Fraction:
    """E_B(perm_{m1} perm_{m2}) for independent Bernoulli(r/n) entries."""
    p = Fraction(r, n)
    total = Fraction(0)
    for (R, C, (d,)), coeff in eb_table(m1, m2).items():
        if R > n or C > n:
            continue
        total += coeff * falling(n, R) * falling(n, C) * p**d
    return total
