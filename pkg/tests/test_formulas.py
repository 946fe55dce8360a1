import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permoments import formulas
from permoments.ensembles import MomentSpec, e1_exact
from permoments.errors import HypothesisViolated
from permoments.formulas import (
    LemmaInput,
    alpha_first_order,
    evaluate_term,
    first_order_limits,
    lemma_residual,
    multinomial_identity_check,
    series_coeffs,
    stirling_lemma_residual,
    symmetry_identity_residual,
    term_I,
    term_II,
    term_III,
    term_IV,
)


def test_term_I_examples():
    assert term_I(MomentSpec(4, 1, (2,))) == 6
    assert term_I(MomentSpec(7, 3, (0,))) == 1
    spec = MomentSpec(8, 2, (5, 3))
    assert term_I(spec) == e1_exact(MomentSpec(8, 2, (5,))) * e1_exact(MomentSpec(8, 2, (3,)))


@pytest.mark.parametrize("n,r,ms", [(5, 2, (2, 2)), (6, 3, (3, 1)), (5, 1, (2, 3)), (6, 2, (2, 1, 2))])
def test_term_I_is_product_of_exact_singles(n, r, ms):
    assert term_I(MomentSpec(n, r, ms)) == math.prod(e1_exact(MomentSpec(n, r, (m,))) for m in ms)


def test_term_II_single_factor_equals_term_I():
    for n, r, m in [(6, 2, 3), (7, 3, 4)]:
        spec = MomentSpec(n, r, (m,))
        assert term_II(spec) == term_I(spec)


def test_term_II_with_empty_second_factor():
    assert term_II(MomentSpec(7, 2, (3, 0))) == term_I(MomentSpec(7, 2, (3,)))


def test_term_II_below_term_I_and_gap_shrinks():
    gaps = []
    for n in (6, 12, 24):
        spec = MomentSpec(n, 2, (1, 1))
        one, two = term_I(spec), term_II(spec)
        assert two <= one
        gaps.append(n * (one - two) / one)
    # n (I - II)/I stays bounded: the relative gap is O(1/n)
    assert all(0 < g < 10 for g in gaps)


def test_terms_III_IV_vanish_when_not_applicable():
    spec = MomentSpec(6, 2, (3,))
    assert term_III(spec) == 0 and term_IV(spec) == 0
    assert not evaluate_term("III", spec).applicable
    assert evaluate_term("II", spec).applicable
    assert term_III(MomentSpec(6, 2, (3, 0))) == 0


def test_term_IV_vanishes_for_one_color():
    assert term_IV(MomentSpec(8, 1, (2, 2))) == 0
    assert term_IV(MomentSpec(8, 1, (3, 1, 2))) == 0


def test_limits_formula_values():
    assert first_order_limits(2, (2, 2)) == {"I-II": 6, "III": 2, "IV": 4}
    assert first_order_limits(3, (2, 1)) == {"I-II": Fraction(10, 3), "III": Fraction(2, 3), "IV": Fraction(8, 3)}


def test_III_and_IV_ratios_approach_limits():
    spec_vals = []
    for n in (40, 80):
        spec = MomentSpec(n, 2, (2, 2))
        one = term_I(spec)
        spec_vals.append((n * term_III(spec) / one, n * term_IV(spec) / one))
    (a3, a4), (b3, b4) = spec_vals
    # closer at the larger n, and within a few percent already
    assert abs(b3 - 2) < abs(a3 - 2) and abs(b3 - 2) < Fraction(1, 10)
    assert abs(b4 - 4) < abs(a4 - 4) and abs(b4 - 4) < Fraction(2, 10)


def test_alpha_examples():
    n = 13
    assert alpha_first_order((3,), ((2, 1),), n) == 0
    assert alpha_first_order((1, 1), ((1, 0), (1, 0)), n) == Fraction(-1, n)
    assert alpha_first_order((1, 1), ((1, 0), (0, 1)), n) == Fraction(-2, n)


def test_alpha_rejects_bad_rows():
    with pytest.raises(ValueError):
        alpha_first_order((2, 1), ((1, 0), (1, 1)), 10)


def test_symmetry_identity_examples():
    assert symmetry_identity_residual(6, 2, 3, 1) == 0
    assert symmetry_identity_residual(5, 3, 2, 2) == 0
    assert symmetry_identity_residual(5, 3, 0, 1) == 0


@settings(max_examples=40)
@given(st.integers(1, 10), st.integers(1, 4), st.integers(0, 6), st.data())
def test_symmetry_identity_property(n, r, m, data):
    j = data.draw(st.integers(1, r))
    assert symmetry_identity_residual(n, r, m, j) == 0


def test_series_coefficient_examples():
    assert series_coeffs(2, 3) == formulas.SeriesCoeffs(Fraction(4, 3), Fraction(-6), Fraction(20, 3))
    for r in (1, 2, 5):
        sc = series_coeffs(r, 1)
        assert sc.b == 0 and sc.c == 0
    s5, s3 = series_coeffs(2, 5), series_coeffs(2, 3)
    assert s5.a * s3.b + s3.a * s5.b == Fraction(-104, 15)


def test_identity_examples():
    assert multinomial_identity_check("A1", 3, 2) == (Fraction(4, 3), Fraction(4, 3))
    lhs, rhs = multinomial_identity_check("A2", 4, 3)
    assert lhs == rhs == Fraction(4, 3) * Fraction(3**4, 24)
    for m in (0, 1):
        lhs, rhs = multinomial_identity_check("A3", m, 3)
        assert lhs == rhs


@given(st.sampled_from(["A1", "A2", "A3", "A4"]), st.integers(0, 10), st.integers(2, 6))
def test_identities_exact(identity, m, r):
    lhs, rhs = multinomial_identity_check(identity, m, r)
    assert lhs == rhs


def test_lemma_telescoping_example():
    inp = LemmaInput((1, -2, 1), (0, 1, 2), 10)
    actual, predicted = stirling_lemma_residual(inp)
    assert predicted == Fraction(21, 200)
    with mpmath.workdps(40):
        assert abs(actual - mpmath.log(mpmath.mpf(10) / 9)) < mpmath.mpf(10) ** -25


def test_lemma_identical_terms_cancel():
    actual, predicted = stirling_lemma_residual(LemmaInput((1, -1), (3, 3), 20))
    assert actual == 0 and predicted == 0


def test_lemma_residual_shrinks_like_cube():
    inp = [LemmaInput((1, -2, 1), (0, 1, 2), n) for n in (10, 20, 40, 80)]
    res = [abs(lemma_residual(x)) for x in inp]
    ratios = [float(a / b) for a, b in zip(res, res[1:])]
    assert all(6 <= q <= 10 for q in ratios)


def test_lemma_hypothesis_violated():
    with pytest.raises(HypothesisViolated):
        LemmaInput((1, -1), (0, 1), 10)
    with pytest.raises(HypothesisViolated):
        LemmaInput((1, 1), (0, 0), 10)


def test_stirling_log_factorial_accuracy():
    for n in (10, 50):
        err = abs(formulas.stirling_log_factorial(n) - mpmath.loggamma(n + 1))
        assert err < 1.0 / (300 * n**3)
