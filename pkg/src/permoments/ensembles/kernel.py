"""Sub-permanent kernel.

perm_m(A) is the sum, over m-subsets of rows, m-subsets of columns and
bijections between them, of the product of the selected entries. All orders
0..mmax come out of one pass of a bitmask DP over column subsets: rows are
taken in order, each row either skipped or matched to a free column.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

Matrix = Sequence[Sequence[int]] | np.ndarray


def as_rows(A: Matrix) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in (A.tolist() if isinstance(A, np.ndarray) else A)]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    return rows


def _dp_poly(sparse_rows: list[list[tuple[int, int]]], mmax: int) -> list[int]:
    """perm_0..perm_mmax for a matrix given as per-row (column, weight) lists."""
    states: dict[int, int] = {0: 1}
    popcount = {0: 0}
    for row in sparse_rows:
        if not row:
            continue
        nxt = dict(states)
        for mask, val in states.items():
            k = popcount[mask]
            if k >= mmax:
                continue
            for col, w in row:
                bit = 1 << col
                if mask & bit:
                    continue
                new = mask | bit
                if new in nxt:
                    nxt[new] += val * w
                else:
                    nxt[new] = val * w
                    popcount[new] = k + 1
        states = nxt
    out = [0] * (mmax + 1)
    for mask, val in states.items():
        out[popcount[mask]] += val
    return out


def _components(rows: list[list[int]]) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite support graph as (rows, cols)."""
    n = len(rows)
    parent = list(range(2 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if v:
                a, b = find(i), find(n + j)
                if a != b:
                    parent[a] = b
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for v in range(2 * n):
        g = groups.setdefault(find(v), ([], []))
        (g[0] if v < n else g[1]).append(v if v < n else v - n)
    return [g for g in groups.values() if g[0] and g[1]]


def poly_mul_trunc(a: Sequence[int], b: Sequence[int], mmax: int) -> list[int]:
    out = [0] * (mmax + 1)
    for i, x in enumerate(a[: mmax + 1]):
        if x:
            for j, y in enumerate(b[: mmax + 1 - i]):
                out[i + j] += x * y
    return out


def subpermanent_poly(A: Matrix, mmax: int, split: bool = True) -> list[int]:
    """[perm_0(A), ..., perm_mmax(A)] as exact integers.

    With ``split`` the support graph is cut into connected components first;
    the generating polynomial of a direct sum is the product of the parts.
    """
    if mmax < 0:
        raise ValueError("mmax must be >= 0")
    rows = as_rows(A)
    if not split:
        sparse = [[(j, v) for j, v in enumerate(row) if v] for row in rows]
        return _dp_poly(sparse, mmax)
    out = [1] + [0] * mmax
    for rs, cs in _components(rows):
        cidx = {c: k for k, c in enumerate(cs)}
        sparse = [[(cidx[j], rows[i][j]) for j in cs if rows[i][j]] for i in rs]
        out = poly_mul_trunc(out, _dp_poly(sparse, min(mmax, len(rs), len(cs))), mmax)
    return out


def subpermanent_sum(A: Matrix, m: int) -> int:
    """perm_m(A); 1 for m = 0 and 0 for m > n."""
    if m < 0:
        raise ValueError("m must be >= 0")
    n = len(A)
    if m > n:
        return 0
    return subpermanent_poly(A, m)[m]
