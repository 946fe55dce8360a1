"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction` throughout. Polynomials and rational
functions are in the single indeterminate ``n`` with rational coefficients.
Nothing in this module rounds.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "SurplusMismatch",
    "NoConsistentModel",
    "factorial",
    "binomial",
    "falling",
    "compositions",
    "multinomial",
    "PolynomialQ",
    "RationalFunctionQ",
    "interpolate_polynomial",
    "reconstruct_rational",
    "format_rational",
    "parse_rational",
]


class SurplusMismatch(ValueError):
    """A surplus node disagrees with the fitted model."""

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class NoConsistentModel(ValueError):
    """No rational function within the degree bounds fits all nodes."""


# factorial memo: append-only list, extended under a lock; readers never see
# a partially written entry because list.append is atomic
_FACT = [1]
_FACT_LOCK = threading.Lock()


def factorial(k: int) -> int:
    if k < 0:
        raise ValueError(f"factorial of negative number {k}")
    if k < len(_FACT):
        return _FACT[k]
    with _FACT_LOCK:
        while len(_FACT) <= k:
            _FACT.append(_FACT[-1] * len(_FACT))
    return _FACT[k]


def binomial(n: int, k: int) -> int:
    """C(n, k), zero outside 0 <= k <= n."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def falling(n: int, k: int) -> int:
    """Falling factorial n (n-1) ... (n-k+1); zero when k > n >= 0."""
    if k < 0:
        raise ValueError("negative length")
    out = 1
    for j in range(k):
        out *= n - j
    return out


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` non-negative parts.

    Order is colexicographic: tuples are compared from the last part backwards,
    so ``compositions(3, 2)`` gives (3,0), (2,1), (1,2), (0,3).
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if total < 0:
        raise ValueError("total must be >= 0")
    if parts == 1:
        yield (total,)
        return
    for last in range(total + 1):
        for head in compositions(total - last, parts - 1):
            yield head + (last,)


def multinomial(parts: Sequence[int]) -> int:
    out = factorial(sum(parts))
    for p in parts:
        out //= factorial(p)
    return out


def format_rational(x: Fraction | int) -> str:
    return str(Fraction(x))


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def _trim(coeffs: Iterable[Fraction]) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class PolynomialQ:
    """Dense polynomial in n; ``coeffs[i]`` multiplies n**i."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def constant(cls, c) -> PolynomialQ:
        return cls((Fraction(c),))

    @classmethod
    def monomial(cls, k: int, c=1) -> PolynomialQ:
        return cls((Fraction(0),) * k + (Fraction(c),))

    @property
    def degree(self) -> int:
        """Index of the top nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, n) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def __add__(self, other: PolynomialQ) -> PolynomialQ:
        k = max(len(self.coeffs), len(other.coeffs))
        return PolynomialQ(tuple(self.coeff(i) + other.coeff(i) for i in range(k)))

    def __neg__(self) -> PolynomialQ:
        return PolynomialQ(tuple(-c for c in self.coeffs))

    def __sub__(self, other: PolynomialQ) -> PolynomialQ:
        return self + (-other)

    def __mul__(self, other) -> PolynomialQ:
        if not isinstance(other, PolynomialQ):
            return PolynomialQ(tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return PolynomialQ()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolynomialQ(tuple(out))

    __rmul__ = __mul__

    def divmod(self, other: PolynomialQ) -> tuple[PolynomialQ, PolynomialQ]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.leading()
        for k in range(len(q) - 1, -1, -1):
            c = rem[k + other.degree] / lead
            q[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return PolynomialQ(tuple(q)), PolynomialQ(tuple(rem))

    __divmod__ = divmod

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> PolynomialQ:
        return cls(tuple(parse_rational(s) for s in data))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("n" if k == 1 else f"n^{k}")
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(terms)


@dataclass(frozen=True)
class RationalFunctionQ:
    """numerator / denominator, denominator monic."""

    numerator: PolynomialQ
    denominator: PolynomialQ

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ZeroDivisionError("zero denominator polynomial")
        lead = self.denominator.leading()
        if lead != 1:
            object.__setattr__(self, "numerator", self.numerator * (1 / lead))
            object.__setattr__(self, "denominator", self.denominator * (1 / lead))

    @classmethod
    def from_polynomial(cls, p: PolynomialQ) -> RationalFunctionQ:
        return cls(p, PolynomialQ.constant(1))

    @property
    def degree(self) -> int:
        """Growth degree deg(num) - deg(den); very negative for the zero function."""
        if self.numerator.is_zero():
            return -(10**9)
        return self.numerator.degree - self.denominator.degree

    def is_polynomial(self) -> bool:
        return self.denominator.degree == 0

    def __call__(self, n) -> Fraction:
        d = self.denominator(n)
        if d == 0:
            raise ZeroDivisionError(f"pole at n={n}")
        return self.numerator(n) / d

    def descending_coeffs(self, count: int) -> list[tuple[int, Fraction]]:
        """First ``count`` terms of the expansion in descending powers of n.

        Returns (power, coefficient) pairs starting at power ``self.degree``.
        """
        if self.numerator.is_zero():
            return []
        p = list(reversed(self.numerator.coeffs))
        d = list(reversed(self.denominator.coeffs))
        # series in x = 1/n: p(x)/d(x), with d[0] = 1 (monic)
        out: list[Fraction] = []
        for k in range(count):
            acc = p[k] if k < len(p) else Fraction(0)
            for j in range(1, min(k, len(d) - 1) + 1):
                acc -= d[j] * out[k - j]
            out.append(acc / d[0])
        top = self.degree
        return [(top - k, c) for k, c in enumerate(out)]

    def to_json(self) -> dict:
        return {"numerator": self.numerator.to_json(), "denominator": self.denominator.to_json()}

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.numerator)
        return f"[{self.numerator}] / [{self.denominator}]"


def interpolate_polynomial(points: Sequence[tuple[int, Fraction]], degree: int) -> PolynomialQ:
    """Exact interpolation through the first ``degree + 1`` points.

    Any further points are checked against the result and raise
    :class:`SurplusMismatch` on disagreement.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if len(points) < degree + 1:
        raise ValueError(f"need {degree + 1} points, got {len(points)}")
    xs = [int(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    fit_x = xs[: degree + 1]
    table = [Fraction(y) for _, y in points[: degree + 1]]
    # Newton divided differences, in place
    for level in range(1, degree + 1):
        for i in range(degree, level - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (fit_x[i] - fit_x[i - level])
    poly = PolynomialQ.constant(table[degree])
    for i in range(degree - 1, -1, -1):
        poly = poly * PolynomialQ((Fraction(-fit_x[i]), Fraction(1))) + PolynomialQ.constant(table[i])
    for x, y in points[degree + 1 :]:
        if poly(x) != y:
            raise SurplusMismatch(
                f"degree-{degree} interpolant disagrees with node n={x}", node=int(x)
            )
    return poly


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan over Q for a square system; None when singular."""
    size = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(size):
        pivot = next((i for i in range(col, size) if aug[i][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(size):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [aug[i][size] for i in range(size)]


def reconstruct_rational(
    points: Sequence[tuple[int, Fraction]],
    max_num_deg: int,
    max_den_deg: int,
    surplus: int = 2,
) -> RationalFunctionQ:
    """Lowest-degree rational function of n through all ``points``.

    Degree pairs are tried by increasing num_deg + den_deg, ties toward the
    smaller denominator degree. Each candidate is fitted on the first
    ``num_deg + den_deg + 1`` points (monic denominator) and must reproduce
    every remaining point; at least ``surplus`` points are always held out.
    """
    pts = [(int(x), Fraction(y)) for x, y in points]
    if len({x for x, _ in pts}) != len(pts):
        raise ValueError("nodes must be distinct")
    for total in range(max_num_deg + max_den_deg + 1):
        for q in range(0, min(total, max_den_deg) + 1):
            p = total - q
            if p > max_num_deg:
                continue
            unknowns = p + 1 + q
            if len(pts) < unknowns + surplus:
                continue
            fit = pts[:unknowns]
            # N(x) - y * (x^q + d_{q-1} x^{q-1} + ... + d_0) = 0
            rows, rhs = [], []
            for x, y in fit:
                rows.append([Fraction(x) ** i for i in range(p + 1)] + [-y * x**j for j in range(q)])
                rhs.append(y * Fraction(x) ** q)
            sol = _solve_exact(rows, rhs)
            if sol is None:
                continue
            num = PolynomialQ(tuple(sol[: p + 1]))
            den = PolynomialQ(tuple(sol[p + 1 :]) + (Fraction(1),))
            if any(den(x) == 0 for x, _ in pts):
                continue
            if all(num(x) == y * den(x) for x, y in pts):
                return RationalFunctionQ(num, den)
    raise NoConsistentModel(
        f"no rational function with num_deg <= {max_num_deg}, den_deg <= {max_den_deg} "
        f"fits {len(pts)} nodes"
    )

