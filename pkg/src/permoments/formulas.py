"""Closed-form terms of the 1/n expansion, evaluated exactly.

Notation: subterm k has order m_k, and its entries are split over the r
colors as a composition (m_{k,1}, ..., m_{k,r}); a composition matrix stacks
one such row per subterm.

* term I   -- product of single-permanent E1 moments.
* term II  -- multiterms whose entries all sit in distinct rows and columns.
* term III -- exactly one entry of a later subterm coincides with an entry
              of an earlier subterm (same position, same color).
* term IV  -- exactly one entry of a later subterm shares a row, or a column,
              with an entry of an earlier subterm (and so has another color).

In III and IV, subterm j contributes only its m_j - 1 unconstrained entries
to the composition sums; the constrained entry is accounted for separately.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath

from .arith import binomial, compositions, factorial, multinomial
from .ensembles.oracles import MomentSpec
from .errors import HypothesisViolated

TERM_LABELS = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class TermValue:
    label: str
    value: Fraction
    spec: MomentSpec
    applicable: bool = True


@dataclass(frozen=True)
class SeriesCoeffs:
    a: Fraction
    b: Fraction
    c: Fraction


@dataclass(frozen=True)
class LemmaInput:
    a_list: tuple[Fraction, ...]
    q_list: tuple[int, ...]
    n: int

    def __post_init__(self):
        a = tuple(Fraction(x) for x in self.a_list)
        q = tuple(int(x) for x in self.q_list)
        object.__setattr__(self, "a_list", a)
        object.__setattr__(self, "q_list", q)
        if len(a) != len(q):
            raise ValueError("a_list and q_list differ in length")
        if sum(a) != 0 or sum(x * y for x, y in zip(a, q)) != 0:
            raise HypothesisViolated("need sum(a) = 0 and sum(a*q) = 0")


def _color_factorials(n: int, comp_matrix: Sequence[Sequence[int]], r: int, extra_color: int | None = None) -> int:
    """prod over colors c of (n - total color-c entries)!; 0 if a color overflows."""
    out = 1
    for c in range(r):
        used = sum(row[c] for row in comp_matrix) + (1 if c == extra_color else 0)
        if used > n:
            return 0
        out *= factorial(n - used)
    return out


def _single_sum(n: int, r: int, m: int) -> Fraction:
    total = 0
    for comp in compositions(m, r):
        if max(comp) > n:
            continue
        w = multinomial(comp)
        for x in comp:
            w *= factorial(n - x)
        total += w
    return Fraction(binomial(n, m) ** 2 * factorial(m) * total, factorial(n) ** r)


def term_I(spec: MomentSpec) -> Fraction:
    """prod_k E1(perm_{m_k}), as the explicit composition sum."""
    out = Fraction(1)
    for m in spec.m_list:
        out *= _single_sum(spec.n, spec.r, m)
    return out


def _subterm_factor(n: int, shift: int, size: int, comp: Sequence[int]) -> int:
    """C(n - shift, size)^2 * size! * multinomial(comp)."""
    return binomial(n - shift, size) ** 2 * factorial(size) * multinomial(comp)


def term_II(spec: MomentSpec) -> Fraction:
    n, r, ms = spec.n, spec.r, spec.m_list
    if sum(ms) > n:
        raise ValueError("term II needs sum(m) <= n")
    total = 0
    starts = [sum(ms[:k]) for k in range(len(ms))]
    for cm in itertools.product(*(list(compositions(m, r)) for m in ms)):
        kernel = 1
        for k, m in enumerate(ms):
            kernel *= _subterm_factor(n, starts[k], m, cm[k])
        total += kernel * _color_factorials(n, cm, r)
    return Fraction(total, factorial(n) ** r)


def _q_kernels(n: int, r: int, ms: Sequence[int], j: int) -> Iterator[tuple[tuple, int]]:
    """Composition matrices and the composition-sum kernel with subterm j reduced by one.

    Subterms after j start one row/column earlier, since subterm j only
    claims m_j - 1 fresh rows and columns.
    """
    sizes = [m - 1 if k == j else m for k, m in enumerate(ms)]
    starts = [sum(ms[:k]) - (1 if k > j else 0) for k in range(len(ms))]
    for cm in itertools.product(*(list(compositions(s, r)) for s in sizes)):
        kernel = 1
        for k, s in enumerate(sizes):
            kernel *= _subterm_factor(n, starts[k], s, cm[k])
        yield cm, kernel


def _check_pairwise(spec: MomentSpec) -> bool:
    if spec.N < 2:
        return False
    if sum(spec.m_list) > spec.n:
        raise ValueError("terms III and IV need sum(m) <= n")
    return True


def term_III(spec: MomentSpec) -> Fraction:
    """Single class-2 entry: subterm j re-uses a color-s entry of subterm i < j."""
    if not _check_pairwise(spec):
        return Fraction(0)
    n, r, ms = spec.n, spec.r, spec.m_list
    total = 0
    for j in range(1, len(ms)):
        if ms[j] == 0:
            continue
        for cm, kernel in _q_kernels(n, r, ms, j):
            weight = kernel * _color_factorials(n, cm, r)
            if weight:
                # sum over i < j and color s of m_{i,s}
                total += weight * sum(sum(cm[i]) for i in range(j))
    return Fraction(total, factorial(n) ** r)


def term_IV(spec: MomentSpec) -> Fraction:
    """Single class-3 or class-4 entry, both classes counted (factor 2).

    The entry (color b) shares a row or column with a color-a entry of an
    earlier subterm, so b != a; it takes one of n - sum(m) + 1 free columns
    (rows) and is one more color-b position for the factorial weight.
    """
    if not _check_pairwise(spec):
        return Fraction(0)
    n, r, ms = spec.n, spec.r, spec.m_list
    free = n - sum(ms) + 1
    total = 0
    for j in range(1, len(ms)):
        if ms[j] == 0:
            continue
        for cm, kernel in _q_kernels(n, r, ms, j):
            if not kernel:
                continue
            for b in range(r):
                fw = _color_factorials(n, cm, r, extra_color=b)
                if not fw:
                    continue
                shared = sum(cm[i][a] for i in range(j) for a in range(r) if a != b)
                total += kernel * fw * shared
    return Fraction(2 * free * total, factorial(n) ** r)


_TERMS = {"I": term_I, "II": term_II, "III": term_III, "IV": term_IV}


def evaluate_term(label: str, spec: MomentSpec) -> TermValue:
    value = _TERMS[label](spec)
    applicable = label in ("I", "II") or spec.N >= 2
    return TermValue(label, value, spec, applicable)


def pair_sum(ms: Sequence[int]) -> int:
    """sum_{i<j} m_i m_j."""
    return sum(ms[i] * ms[j] for j in range(len(ms)) for i in range(j))


def first_order_limits(r: int, ms: Sequence[int]) -> dict[str, Fraction]:
    """Limits of n(I-II)/I, n III/I and n IV/I as n -> infinity."""
    s = pair_sum(ms)
    return {
        "I-II": 2 * (1 - Fraction(1, 2 * r)) * s,
        "III": Fraction(s, r),
        "IV": Fraction(2 * (r - 1) * s, r),
    }


def alpha_first_order(m_list: Sequence[int], comp_matrix: Sequence[Sequence[int]], n: int) -> Fraction:
    """First-order log of kII/kI for one composition matrix."""
    _check_rows(m_list, comp_matrix)
    N = len(m_list)
    cross = sum(m_list[t] * m_list[k] for k in range(N) for t in range(k))
    r = len(comp_matrix[0]) if comp_matrix else 0
    color_cross = sum(
        comp_matrix[t][i] * comp_matrix[k][i] for i in range(r) for k in range(N) for t in range(k)
    )
    return Fraction(-4 * cross + 2 * color_cross, 2 * n)


def alpha_long_form(m_list: Sequence[int], comp_matrix: Sequence[Sequence[int]], n: int) -> Fraction:
    """The same quantity before simplification (squares of partial sums)."""
    _check_rows(m_list, comp_matrix)
    N = len(m_list)
    r = len(comp_matrix[0]) if comp_matrix else 0
    before = [sum(m_list[:k]) for k in range(N)]
    upto = [sum(m_list[: k + 1]) for k in range(N)]
    body = (
        2 * sum(x * x for x in before)
        + 2 * sum(m * m for m in m_list)
        - 2 * sum(x * x for x in upto)
        + sum(sum(row[i] for row in comp_matrix) ** 2 for i in range(r))
        - sum(x * x for row in comp_matrix for x in row)
    )
    return Fraction(body, 2 * n)


def kernel_ratio(m_list: Sequence[int], comp_matrix: Sequence[Sequence[int]], n: int) -> Fraction:
    """Exact kII/kI for one composition matrix."""
    _check_rows(m_list, comp_matrix)
    r = len(comp_matrix[0])
    N = len(m_list)
    num = factorial(n) ** (r * (N - 1))
    den = 1
    for k, m in enumerate(m_list):
        num *= binomial(n - sum(m_list[:k]), m) ** 2
        den *= binomial(n, m) ** 2
    num *= _color_factorials(n, comp_matrix, r)
    for row in comp_matrix:
        for x in row:
            den *= factorial(n - x)
    return Fraction(num, den)


def _check_rows(m_list, comp_matrix):
    if len(m_list) != len(comp_matrix) or any(sum(row) != m for row, m in zip(comp_matrix, m_list)):
        raise ValueError("composition matrix rows must sum to m_k")


def symmetry_identity_residual(n: int, r: int, m: int, j: int) -> Fraction:
    """sum over compositions of the single-moment kernel times (m_j - m/r); should be 0.

    ``j`` is 1-based.
    """
    if not 1 <= j <= r:
        raise ValueError("color index j must be in 1..r")
    total = Fraction(0)
    for comp in compositions(m, r):
        if max(comp, default=0) > n:
            continue
        w = binomial(n, m) ** 2 * factorial(m) * multinomial(comp)
        for x in comp:
            w *= factorial(n - x)
        total += w * (comp[j - 1] - Fraction(m, r))
    return total / factorial(n) ** r


def series_coeffs(r: int, m: int) -> SeriesCoeffs:
    """Top three coefficients a n^m + b n^{m-1} + c n^{m-2} of the E-moment of perm_m."""
    if m < 0 or r < 1:
        raise ValueError("need m >= 0, r >= 1")
    base = Fraction(r**m, factorial(m))
    b = base * m * (m - 1) * (-1 + Fraction(1, 2 * r))
    c = (
        base
        * m
        * (m - 1)
        * (m - 2)
        * (Fraction(3 * m + 1, 6) - Fraction(m + 1, 2 * r) + Fraction(3 * m + 7, 24 * r * r))
    )
    return SeriesCoeffs(base, b, c)


def multinomial_identity_check(identity: str, m: int, r: int) -> tuple[Fraction, Fraction]:
    """(explicit sum over compositions, closed form) for identities A1..A4."""
    if identity == "A4" and r < 2:
        raise ValueError("A4 needs r >= 2")
    weight = {
        "A1": lambda c: 1,
        "A2": lambda c: c[0],
        "A3": lambda c: c[0] ** 2,
        "A4": lambda c: c[0] * c[1],
    }[identity]
    lhs = sum(
        (Fraction(weight(c), _prod_factorials(c)) for c in compositions(m, r)), Fraction(0)
    )
    fm = factorial(m)
    rf = Fraction(r)
    if identity == "A1":
        rhs = rf**m / fm
    elif identity == "A2":
        rhs = Fraction(m) / r * rf**m / fm
    elif identity == "A3":
        rhs = (m * (m - 1) * rf ** (m - 2) + m * rf ** (m - 1)) / fm
    else:
        rhs = m * (m - 1) * rf ** (m - 2) / fm
    return lhs, rhs


def _prod_factorials(c):
    out = 1
    for x in c:
        out *= factorial(x)
    return out


def stirling_log_factorial(n: int, dps: int = 50) -> mpmath.mpf:
    """ln n! through the 1/(12n) term."""
    with mpmath.workdps(dps):
        n = mpmath.mpf(n)
        return n * mpmath.log(n) - n + mpmath.log(2 * mpmath.pi) / 2 + mpmath.log(n) / 2 + 1 / (12 * n)


def lemma_prediction(inp: LemmaInput) -> Fraction:
    n = inp.n
    return sum(
        (
            a * (Fraction(q * q, 2 * n) + Fraction(q**3, 6 * n * n) - Fraction(q * q, 4 * n * n))
            for a, q in zip(inp.a_list, inp.q_list)
        ),
        Fraction(0),
    )


def stirling_lemma_residual(inp: LemmaInput) -> tuple[mpmath.mpf, Fraction]:
    """(sum a_i ln((n-q_i)!), its predicted expansion).

    The log-factorials are evaluated with loggamma at a working precision
    well beyond 1/n^5, so the difference isolates the O(1/n^3) remainder.
    """
    if inp.n <= max(inp.q_list, default=0):
        raise ValueError("need n > max(q)")
    dps = 30 + 5 * len(str(inp.n))
    with mpmath.workdps(dps):
        actual = mpmath.fsum(
            mpmath.mpf(a.numerator) / a.denominator * mpmath.loggamma(inp.n - q + 1)
            for a, q in zip(inp.a_list, inp.q_list)
        )
    return actual, lemma_prediction(inp)


def lemma_residual(inp: LemmaInput) -> mpmath.mpf:
    """actual - predicted, formed at the working precision of the actual side."""
    actual, predicted = stirling_lemma_residual(inp)
    with mpmath.workdps(30 + 5 * len(str(inp.n))):
        return actual - mpmath.mpf(predicted.numerator) / predicted.denominator
