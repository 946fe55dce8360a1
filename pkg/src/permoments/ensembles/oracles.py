"""Ground-truth expectations of products of sub-permanents.

Routes for E1 (sum of r uniform permutation matrices):

``cycle-reduced``
    r = 2 only. sigma_1 is fixed to the identity (perm_m is invariant under
    A -> PAQ) and sigma_2 is replaced by its conjugacy class, weighted by the
    class size. I + P_sigma is a direct sum of cycle blocks, so its
    sub-permanent polynomial is a product of cached block polynomials.
``conjugacy``
    any r. sigma_1 = identity, sigma_2 summed over cycle types, sigma_3..sigma_r
    enumerated in full; the kernel runs on every matrix.
``naive``
    sigma_1 = identity, everything else enumerated. Reference for the other two.
``matching-union``
    N <= 2, any r and n; see :mod:`permoments.ensembles.unions`.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..arith import binomial, factorial, format_rational
from ..errors import BudgetExceeded, InfeasibleEnsemble
from .cycles import cycle_types, identity_plus_poly, partition_count
from .kernel import subpermanent_poly
from .unions import e1_union_moment, eb_union_moment

DEFAULT_BUDGET = 2_000_000


def default_budget() -> int:
    return int(os.environ.get("PERMOMENTS_BUDGET", DEFAULT_BUDGET))


class MeasureKind(str, enum.Enum):
    E1 = "e1"
    E_UNIFORM = "e"
    EB = "eb"


@dataclass(frozen=True)
class MomentSpec:
    n: int
    r: int
    m_list: tuple[int, ...] = field(default=(1,))

    def __post_init__(self):
        object.__setattr__(self, "m_list", tuple(int(m) for m in self.m_list))
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.m_list or any(m < 0 for m in self.m_list):
            raise ValueError("m_list must be non-empty with entries >= 0")

    @property
    def N(self) -> int:
        return len(self.m_list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["m_list"] = list(self.m_list)
        return d


@dataclass(frozen=True)
class OracleResult:
    spec: MomentSpec
    value: Fraction
    method: str

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "value": format_rational(self.value), "method": self.method}


def _product(poly: Sequence[int], m_list: Sequence[int]) -> int:
    out = 1
    for m in m_list:
        out *= poly[m] if m < len(poly) else 0
    return out


def _perm_matrix_sum(n: int, perms: Iterable[Sequence[int]]) -> list[list[int]]:
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = 1
    for p in perms:
        for i in range(n):
            A[i][p[i]] += 1
    return A


def _accumulate(mats_and_weights, m_lists, mmax):
    sums = [0] * len(m_lists)
    for weight, perms, n in mats_and_weights:
        poly = subpermanent_poly(_perm_matrix_sum(n, perms), mmax)
        for k, ml in enumerate(m_lists):
            sums[k] += weight * _product(poly, ml)
    return sums


def _brute_chunk(args):
    n, r, lead_perms, m_lists, mmax = args
    all_perms = list(itertools.permutations(range(n)))
    jobs = (
        (w, (lead,) + tail, n)
        for w, lead in lead_perms
        for tail in itertools.product(all_perms, repeat=r - 2)
    )
    return _accumulate(jobs, m_lists, mmax)


def _brute_sums(n, r, lead_perms, m_lists, workers):
    """sum over lead perms (weighted) x all (r-2)-tuples, split across workers."""
    mmax = max(max(ml) for ml in m_lists)
    if r == 1:
        return _accumulate([(1, (), n)], m_lists, mmax)
    chunks = [lead_perms[i::workers] for i in range(workers)] if workers > 1 else [lead_perms]
    args = [(n, r, c, m_lists, mmax) for c in chunks if c]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_brute_chunk, args))
    else:
        parts = [_brute_chunk(a) for a in args]
    # exact integer sums: combine in chunk order, result independent of workers
    return [sum(p[k] for p in parts) for k in range(len(m_lists))]


def _check_budget(estimate: int, budget: int | None, what: str) -> None:
    budget = default_budget() if budget is None else budget
    if estimate > budget:
        raise BudgetExceeded(estimate, budget, what)


def e1_work_estimate(n: int, r: int, method: str) -> int:
    if method == "cycle-reduced":
        return partition_count(n)
    if method == "conjugacy":
        return partition_count(n) * math.factorial(n) ** max(r - 2, 0) if r >= 2 else 1
    if method == "naive":
        return math.factorial(n) ** (r - 1)
    return 1


def e1_moments(
    n: int,
    r: int,
    m_lists: Sequence[Sequence[int]],
    method: str = "auto",
    budget: int | None = None,
    workers: int = 1,
) -> list[Fraction]:
    """E1 of prod_k perm_{m_k} for several m-lists sharing (n, r), in one pass."""
    m_lists = [tuple(ml) for ml in m_lists]
    if method == "auto":
        method = pick_e1_method(r, max(len(ml) for ml in m_lists), n)
    if method == "matching-union":
        out = []
        for ml in m_lists:
            if len(ml) > 2:
                raise ValueError("matching-union handles at most two factors")
            out.append(e1_union_moment(n, r, *ml))
        return out
    _check_budget(e1_work_estimate(n, r, method), budget, f"E1 {method}")
    mmax = max(max(ml) for ml in m_lists)
    norm = factorial(n) ** (r - 1)
    if method == "cycle-reduced":
        if r != 2:
            raise ValueError("cycle-reduced route needs r = 2")
        sums = [0] * len(m_lists)
        for ct in cycle_types(n):
            poly = identity_plus_poly(ct.partition, mmax)
            for k, ml in enumerate(m_lists):
                sums[k] += ct.class_size * _product(poly, ml)
    elif method == "conjugacy":
        lead = [(ct.class_size, ct.representative()) for ct in cycle_types(n)]
        sums = _brute_sums(n, r, lead, m_lists, workers)
    elif method == "naive":
        lead = [(1, p) for p in itertools.permutations(range(n))]
        sums = _brute_sums(n, r, lead, m_lists, workers)
    else:
        raise ValueError(f"unknown E1 method {method!r}")
    return [Fraction(s, norm) for s in sums]


CYCLE_REDUCED_MAX_N = 30


def pick_e1_method(r: int, N: int, n: int = 0) -> str:
    """cycle-reduced for r = 2 while p(n) is small, matching-union for pairs, else conjugacy."""
    if r == 2 and (n <= CYCLE_REDUCED_MAX_N or N > 2):
        return "cycle-reduced"
    if N <= 2:
        return "matching-union"
    return "conjugacy"


def e1_exact(spec: MomentSpec, method: str = "auto", budget: int | None = None, workers: int = 1) -> Fraction:
    return e1_moments(spec.n, spec.r, [spec.m_list], method, budget, workers)[0]


def e1_exact_naive(spec: MomentSpec, budget: int | None = None, workers: int = 1) -> Fraction:
    return e1_moments(spec.n, spec.r, [spec.m_list], "naive", budget, workers)[0]


def e1_result(spec: MomentSpec, method: str = "auto", budget: int | None = None) -> OracleResult:
    if method == "auto":
        method = pick_e1_method(spec.r, spec.N, spec.n)
    return OracleResult(spec, e1_exact(spec, method, budget), method)


# -- uniform r-regular 0/1 ensemble, tiny n ---------------------------------


def regular_01_matrices(n: int, r: int):
    """All n x n 0/1 matrices with every row and column sum r.

    Row-by-row backtracking; a column is only available while it has spare
    capacity, and a branch is cut once some column needs more ones than rows
    remain.
    """
    if r > n or r < 0:
        raise InfeasibleEnsemble(f"no {n}x{n} 0/1 matrix has line sums {r}")
    capacity = [r] * n
    rows: list[tuple[int, ...]] = []

    def rec(i):
        if i == n:
            yield [[1 if j in row else 0 for j in range(n)] for row in rows]
            return
        left = n - i
        if any(c > left for c in capacity):
            return
        # columns that must be used in this row
        forced = [j for j in range(n) if capacity[j] == left]
        if len(forced) > r:
            return
        free = [j for j in range(n) if capacity[j] > 0 and capacity[j] < left]
        for extra in itertools.combinations(free, r - len(forced)):
            row = tuple(sorted(forced + list(extra)))
            for j in row:
                capacity[j] -= 1
            rows.append(row)
            yield from rec(i + 1)
            rows.pop()
            for j in row:
                capacity[j] += 1

    yield from rec(0)


def regular_count_estimate(n: int, r: int) -> int:
    """Approximate number of r-regular n x n 0/1 matrices, (nr)!/(r!)^(2n) e^{-(r-1)^2/2}."""
    return max(1, round(math.factorial(n * r) / math.factorial(r) ** (2 * n) * math.exp(-((r - 1) ** 2) / 2)))


def e_uniform_moments(
    n: int, r: int, m_lists: Sequence[Sequence[int]], max_n: int = 6, budget: int | None = None
) -> list[Fraction]:
    if r > n:
        raise InfeasibleEnsemble(f"r={r} exceeds n={n}")
    if n > max_n:
        raise BudgetExceeded(regular_count_estimate(n, r), max_n, f"uniform enumeration (n cap {max_n})")
    _check_budget(regular_count_estimate(n, r), budget, "uniform enumeration")
    mmax = max(max(ml) for ml in m_lists)
    sums = [0] * len(m_lists)
    count = 0
    for A in regular_01_matrices(n, r):
        poly = subpermanent_poly(A, mmax)
        count += 1
        for k, ml in enumerate(m_lists):
            sums[k] += _product(poly, ml)
    return [Fraction(s, count) for s in sums]


def e_uniform_exact_tiny(spec: MomentSpec, max_n: int = 6, budget: int | None = None) -> Fraction:
    return e_uniform_moments(spec.n, spec.r, [spec.m_list], max_n, budget)[0]


# -- Bernoulli ensemble -----------------------------------------------------


def eb_expectation_single(n: int, r: int, m: int) -> Fraction:
    """C(n,m)^2 m! (r/n)^m."""
    return binomial(n, m) ** 2 * factorial(m) * Fraction(r, n) ** m


def partial_permutations(n: int, m: int):
    for rows in itertools.combinations(range(n), m):
        for cols in itertools.permutations(range(n), m):
            # column tuple in any order = a bijection rows -> cols
            yield frozenset(zip(rows, cols))


def eb_product_exact_tiny(n: int, r: int, m1: int, m2: int, budget: int | None = None) -> Fraction:
    """E_B(perm_m1 perm_m2) by enumerating pairs of supports."""
    size1 = binomial(n, m1) * math.perm(n, m1) if m1 <= n else 0
    size2 = binomial(n, m2) * math.perm(n, m2) if m2 <= n else 0
    _check_budget(size1 * size2, budget, "E_B support pairs")
    p = Fraction(r, n)
    supports2 = list(partial_permutations(n, m2))
    by_union: dict[int, int] = {}
    for s1 in partial_permutations(n, m1):
        for s2 in supports2:
            u = len(s1 | s2)
            by_union[u] = by_union.get(u, 0) + 1
    return sum((cnt * p**u for u, cnt in by_union.items()), Fraction(0))


def eb_product_exact(n: int, r: int, m1: int, m2: int) -> Fraction:
    return eb_union_moment(n, r, m1, m2)
