import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permoments.ensembles import (
    MeasureKind,
    MomentSpec,
    cycle_type_of,
    cycle_types,
    e1_exact,
    e1_exact_naive,
    e1_moments,
    e1_result,
    e_uniform_exact_tiny,
    eb_expectation_single,
    eb_product_exact,
    eb_product_exact_tiny,
    identity_plus_poly,
    monte_carlo_moment,
    pick_e1_method,
    regular_01_matrices,
    sample,
    subpermanent_poly,
    subpermanent_sum,
)
from permoments.ensembles.cycles import cycle_block_poly, partition_count
from permoments.ensembles.unions import e1_union_moment
from permoments.errors import BudgetExceeded, InfeasibleEnsemble, UnsupportedMeasure
from permoments.verify import KNOWN_Q1_R2_5_3


def brute_subpermanent(A, m):
    n = len(A)
    total = 0
    for rows in itertools.combinations(range(n), m):
        for cols in itertools.permutations(range(n), m):
            total += math.prod(A[i][j] for i, j in zip(rows, cols))
    return total


small_matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 3), min_size=n, max_size=n), min_size=n, max_size=n)
)


# -- kernel -------------------------------------------------------------------


def test_subpermanent_examples():
    eye = np.eye(3, dtype=int)
    assert subpermanent_sum(eye, 2) == 3
    assert subpermanent_sum(np.ones((3, 3), dtype=int), 2) == 18


@settings(max_examples=60)
@given(small_matrices, st.integers(0, 6))
def test_kernel_matches_definition(A, m):
    expected = brute_subpermanent(A, m) if m <= len(A) else 0
    assert subpermanent_sum(A, m) == expected


@given(small_matrices)
def test_m0_and_m1_and_beyond_n(A):
    assert subpermanent_sum(A, 0) == 1
    assert subpermanent_sum(A, 1) == sum(map(sum, A))
    assert subpermanent_sum(A, len(A) + 1) == 0


@settings(max_examples=60)
@given(small_matrices, st.randoms(use_true_random=False))
def test_row_column_permutation_invariance(A, rnd):
    n = len(A)
    p = list(range(n))
    q = list(range(n))
    rnd.shuffle(p)
    rnd.shuffle(q)
    B = [[A[p[i]][q[j]] for j in range(n)] for i in range(n)]
    assert subpermanent_poly(A, n) == subpermanent_poly(B, n)


@given(small_matrices)
def test_component_split_agrees_with_plain_dp(A):
    n = len(A)
    assert subpermanent_poly(A, n, split=True) == subpermanent_poly(A, n, split=False)


# -- cycle types --------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 13))
def test_class_sizes_sum_to_factorial(n):
    types = cycle_types(n)
    assert sum(ct.class_size for ct in types) == math.factorial(n)
    assert len(types) == partition_count(n)


def test_representative_has_its_cycle_type():
    for ct in cycle_types(7):
        assert tuple(sorted(cycle_type_of(ct.representative()), reverse=True)) == ct.partition


@pytest.mark.parametrize("L", range(1, 9))
def test_cycle_block_counts_matchings_of_even_cycle(L):
    # I + C_L is the bipartite 2L-cycle (a double edge when L = 1)
    poly = cycle_block_poly(L, L)
    for m in range(1, L + 1):
        if L == 1:
            expected = 2
        else:
            expected = Fraction(2 * L, 2 * L - m) * math.comb(2 * L - m, m)
        assert poly[m] == expected


def test_identity_plus_poly_matches_kernel():
    for ct in cycle_types(6):
        perm = ct.representative()
        A = np.eye(6, dtype=int)
        A[np.arange(6), perm] += 1
        assert identity_plus_poly(ct.partition, 6) == subpermanent_poly(A, 6)


# -- E1 oracles ---------------------------------------------------------------


def test_e1_examples():
    assert e1_exact(MomentSpec(3, 2, (1,))) == 6
    assert e1_exact(MomentSpec(4, 1, (2,))) == 6
    assert e1_exact(MomentSpec(8, 2, (5, 3))) == KNOWN_Q1_R2_5_3(8)
    assert e1_exact_naive(MomentSpec(3, 2, (1,))) == 6


def test_naive_equals_reduced_routes():
    spec = MomentSpec(4, 2, (2,))
    assert e1_exact_naive(spec) == e1_exact(spec)
    spec = MomentSpec(5, 2, (2, 2))
    assert e1_exact_naive(spec) == e1_exact(spec, "cycle-reduced")


@pytest.mark.parametrize("r", [1, 2, 3])
def test_all_routes_agree_at_n4(r):
    m_lists = [(1,), (2,), (3,), (2, 2), (3, 1), (4, 2), (2, 2, 2)]
    naive = e1_moments(4, r, m_lists, "naive")
    assert e1_moments(4, r, m_lists, "conjugacy") == naive
    if r == 2:
        assert e1_moments(4, r, m_lists, "cycle-reduced") == naive
    pairs = [ml for ml in m_lists if len(ml) <= 2]
    assert e1_moments(4, r, pairs, "matching-union") == [v for ml, v in zip(m_lists, naive) if len(ml) <= 2]


def test_union_route_at_n5_r3():
    for ml in [(2, 2), (3, 2), (1, 4)]:
        assert e1_union_moment(5, 3, *ml) == e1_exact(MomentSpec(5, 3, ml), "conjugacy")


@pytest.mark.parametrize("n,m", [(4, 2), (6, 3), (9, 4)])
def test_r1_is_binomial(n, m):
    assert e1_exact(MomentSpec(n, 1, (m,))) == math.comb(n, m)


def test_perm1_is_deterministic():
    for n, r in [(5, 2), (6, 3)]:
        assert e1_exact(MomentSpec(n, r, (1,))) == r * n
        assert e1_exact(MomentSpec(n, r, (1, 3))) == r * n * e1_exact(MomentSpec(n, r, (3,)))


def test_budget_refuses_up_front():
    with pytest.raises(BudgetExceeded):
        e1_exact(MomentSpec(9, 3, (2, 2, 2)), "naive", budget=1000)


def test_auto_route_selection():
    assert pick_e1_method(2, 2, 10) == "cycle-reduced"
    assert pick_e1_method(2, 2, 64) == "matching-union"
    assert pick_e1_method(3, 2, 8) == "matching-union"
    assert pick_e1_method(3, 3, 5) == "conjugacy"


def test_oracle_result_json():
    res = e1_result(MomentSpec(3, 2, (2,)))
    d = res.to_json()
    assert d["method"] == "cycle-reduced"
    assert Fraction(d["value"]) == res.value
    assert d["spec"] == {"n": 3, "r": 2, "m_list": [2]}


# -- uniform 0/1 ensemble -----------------------------------------------------


def test_uniform_r_equals_n_is_all_ones():
    for ms in [(2,), (1, 2), (3,)]:
        expected = math.prod(math.comb(3, m) ** 2 * math.factorial(m) for m in ms)
        assert e_uniform_exact_tiny(MomentSpec(3, 3, ms)) == expected


def test_uniform_r1_matches_e1():
    assert e_uniform_exact_tiny(MomentSpec(4, 1, (2,))) == 6
    for m in range(4):
        assert e_uniform_exact_tiny(MomentSpec(4, 1, (m,))) == e1_exact(MomentSpec(4, 1, (m,)))


def test_uniform_against_independent_enumeration():
    # every row with two ones, keep the ones whose columns also sum to two
    n = 5
    row_choices = [tuple(1 if j in c else 0 for j in range(n)) for c in itertools.combinations(range(n), 2)]
    total, count = 0, 0
    for rows in itertools.product(row_choices, repeat=n):
        if all(sum(col) == 2 for col in zip(*rows)):
            count += 1
            total += brute_subpermanent(rows, 2)
    assert count == sum(1 for _ in regular_01_matrices(5, 2))
    assert e_uniform_exact_tiny(MomentSpec(5, 2, (2,))) == Fraction(total, count)


def test_uniform_infeasible_and_capped():
    with pytest.raises(InfeasibleEnsemble):
        e_uniform_exact_tiny(MomentSpec(3, 4, (1,)))
    with pytest.raises(BudgetExceeded):
        e_uniform_exact_tiny(MomentSpec(8, 2, (2,)))


# -- Bernoulli ensemble -------------------------------------------------------


def test_eb_single_examples():
    assert eb_expectation_single(4, 2, 1) == 8
    assert eb_expectation_single(7, 3, 0) == 1
    assert eb_expectation_single(5, 2, 2) == 32


def test_eb_product_of_two_perm1():
    # perm_1 is a sum of n^2 Bernoulli(p): E X^2 = (n^2 p)^2 + n^2 p (1 - p)
    n, r = 3, 1
    p = Fraction(r, n)
    expected = (n * n * p) ** 2 + n * n * p * (1 - p)
    assert expected == 11
    assert eb_product_exact_tiny(n, r, 1, 1) == expected
    assert eb_product_exact(n, r, 1, 1) == expected


def test_eb_tiny_with_m2_zero():
    assert eb_product_exact_tiny(4, 2, 2, 0) == eb_expectation_single(4, 2, 2)


@pytest.mark.parametrize("n,r,m1,m2", [(3, 1, 2, 2), (4, 2, 2, 1), (4, 3, 2, 2), (4, 1, 3, 2)])
def test_eb_union_equals_support_enumeration(n, r, m1, m2):
    assert eb_product_exact(n, r, m1, m2) == eb_product_exact_tiny(n, r, m1, m2)


# -- sampling -----------------------------------------------------------------


@given(st.integers(0, 2**32), st.integers(0, 50))
def test_e1_samples_are_regular(seed, index):
    A = sample("e1", MomentSpec(5, 2), seed, index)
    assert (A.sum(axis=0) == 2).all() and (A.sum(axis=1) == 2).all()
    P = sample("e1", MomentSpec(5, 1), seed, index)
    assert sorted(P.sum(axis=0)) == [1] * 5 and set(np.unique(P)) <= {0, 1}


@given(st.integers(0, 2**32))
def test_eb_samples_are_binary(seed):
    A = sample("eb", MomentSpec(5, 2), seed)
    assert set(np.unique(A)) <= {0, 1}


def test_samples_are_reproducible_per_index():
    a = sample("e1", MomentSpec(6, 3), 11, 4)
    b = sample("e1", MomentSpec(6, 3), 11, 4)
    c = sample("e1", MomentSpec(6, 3), 11, 5)
    assert (a == b).all() and not (a == c).all()


def test_sampling_uniform_ensemble_unsupported():
    with pytest.raises(UnsupportedMeasure):
        sample(MeasureKind.E_UNIFORM, MomentSpec(4, 2), 0)


def test_mc_deterministic_perm1():
    mean, err = monte_carlo_moment("e1", MomentSpec(6, 2, (1,)), 1000, 3)
    assert mean == 12.0 and err == 0.0


def test_mc_e1_within_four_sigma():
    spec = MomentSpec(8, 2, (3,))
    mean, err = monte_carlo_moment("e1", spec, 20000, 7)
    assert abs(mean - float(e1_exact(spec))) <= 4 * err


def test_mc_eb_within_four_sigma():
    mean, err = monte_carlo_moment("eb", MomentSpec(8, 2, (2,)), 20000, 7)
    assert abs(mean - float(eb_expectation_single(8, 2, 2))) <= 4 * err
    mean, err = monte_carlo_moment("eb", MomentSpec(4, 2, (1, 1)), 20000, 8)
    assert abs(mean - float(eb_product_exact_tiny(4, 2, 1, 1))) <= 4 * err
