import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import complete, path
from gbskernel.errors import NotPositiveDefinite, NotSymmetric, OddSize, TooLarge
from gbskernel.hafnian import (
    count_r_matchings,
    double_factorial_pairs,
    gbs_polynomial,
    hafnian,
    involution_number,
    isserlis_moment,
    loop_hafnian,
    matching_polynomial,
    pair_partitions,
    partitions_up_to_two,
)
from gbskernel.synthetic import random_graph, random_symmetric


def brute_haf(m):
    """Oracle: Hafnian straight from the pair-partition generator."""
    return math.fsum(math.prod(m[u, v] for u, v in p) for p in pair_partitions(m.shape[0]))


def brute_lhaf(m):
    return math.fsum(
        math.prod(m[b[0], b[-1]] for b in p) for p in partitions_up_to_two(m.shape[0])
    )


def brute_matchings(a, r):
    """Oracle: all r-subsets of the edge list, keeping the vertex-disjoint ones."""
    edges = [(i, j) for i in range(len(a)) for j in range(i + 1, len(a)) if a[i, j] != 0]
    total = 0.0
    for subset in combinations(edges, r):
        nodes = [x for e in subset for x in e]
        if len(set(nodes)) == 2 * r:
            total += math.prod(a[i, j] for i, j in subset)
    return total


def test_pair_partitions_of_four():
    assert list(pair_partitions(4)) == [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]


def test_pair_partitions_edge_cases():
    assert list(pair_partitions(0)) == [()]
    assert len(list(pair_partitions(6))) == 15
    with pytest.raises(OddSize):
        list(pair_partitions(3))
    with pytest.raises(TooLarge):
        list(pair_partitions(22))


@pytest.mark.parametrize("n", [0, 2, 4, 6, 8, 10])
def test_pair_partition_counts(n):
    parts = list(pair_partitions(n))
    assert len(parts) == math.factorial(n) // (math.factorial(n // 2) * 2 ** (n // 2))
    for p in parts:
        assert sorted(x for pair in p for x in pair) == list(range(n))


def test_partitions_up_to_two():
    assert len(list(partitions_up_to_two(4))) == 10
    assert list(partitions_up_to_two(1)) == [((0,),)]
    assert sorted(partitions_up_to_two(2)) == sorted([((0, 1),), ((0,), (1,))])
    for n in range(9):
        assert len(list(partitions_up_to_two(n))) == involution_number(n)
    with pytest.raises(TooLarge):
        list(partitions_up_to_two(17))


def test_involution_numbers():
    assert [involution_number(n) for n in range(8)] == [1, 1, 2, 4, 10, 26, 76, 232]


def test_hafnian_examples():
    assert hafnian(complete(4).adjacency) == 3.0
    assert hafnian(np.arange(9.0).reshape(3, 3) + np.arange(9.0).reshape(3, 3).T) == 0.0
    assert hafnian([[0, 2.5], [2.5, 0]]) == 2.5
    assert hafnian(np.zeros((0, 0))) == 1.0
    with pytest.raises(NotSymmetric):
        hafnian([[0, 1], [2, 0]])


def test_hafnian_complete_graphs_are_double_factorials():
    for n in range(0, 17, 2):
        assert hafnian(complete(n).adjacency if n else np.zeros((0, 0))) == double_factorial_pairs(n)


def test_loop_hafnian_examples():
    assert loop_hafnian([[3.5]]) == 3.5
    b1, a, b2 = 0.7, -1.3, 2.1
    m = np.array([[b1, a], [a, b2]])
    assert loop_hafnian(m) == pytest.approx(brute_lhaf(m), rel=1e-15)
    assert loop_hafnian(m) == pytest.approx(a + b1 * b2, rel=1e-15)
    assert loop_hafnian(complete(4).adjacency) == 3.0


@pytest.mark.parametrize("n", range(0, 11))
def test_hafnian_matches_partition_oracle(n):
    m = random_symmetric(n, seed=n)
    assert hafnian(m) == pytest.approx(brute_haf(m) if n % 2 == 0 else 0.0, rel=1e-12, abs=1e-12)
    d = random_symmetric(n, seed=100 + n, zero_diagonal=False)
    assert loop_hafnian(d) == pytest.approx(brute_lhaf(d), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_hafnian_of_direct_sum_is_square(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        a = rng.uniform(0, 1, size=(n, n))
        a = a + a.T
        np.fill_diagonal(a, 0)
        big = np.zeros((2 * n, 2 * n))
        big[:n, :n] = big[n:, n:] = a
        assert hafnian(big) == pytest.approx(hafnian(a) ** 2, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 8), st.integers(0, 10_000))
def test_loop_hafnian_zero_diagonal_equals_hafnian(n, seed):
    m = random_symmetric(n, seed)
    assert loop_hafnian(m) == hafnian(m)


def test_count_r_matchings_examples():
    assert count_r_matchings(complete(3), 1) == 3
    assert count_r_matchings(complete(4), 2) == 3
    assert brute_matchings(complete(4).adjacency, 2) == 3
    assert count_r_matchings(path(5), 0) == 1
    assert count_r_matchings(complete(3), 2) == 0


@pytest.mark.parametrize("seed", range(12))
def test_count_r_matchings_matches_subset_oracle(seed):
    g = random_graph(7 + seed % 3, 0.5, seed, weighted=seed % 2 == 1)
    for r in range(0, 5):
        expected = brute_matchings(g.adjacency, r) if r else 1.0
        assert count_r_matchings(g, r) == pytest.approx(expected, rel=1e-12)


def test_matching_polynomial_examples():
    assert matching_polynomial(complete(3)).coefficients == (1, 3, 0)
    assert matching_polynomial(path(3)).coefficients == (1, 2, 0)
    assert matching_polynomial(np.zeros((1, 1))).coefficients == (1, 0)
    # K3 polynomial x^3 - 3x
    assert matching_polynomial(complete(3))(2.0) == 2.0


@pytest.mark.parametrize("seed", range(10))
def test_matching_polynomial_routes_agree(seed):
    g = random_graph(4 + seed % 5, 0.6, seed, weighted=True)
    a = matching_polynomial(g, "enumerate").coefficients
    b = matching_polynomial(g, "hafnian").coefficients
    assert np.allclose(a, b, rtol=1e-9, atol=1e-12)


def test_gbs_polynomial_examples():
    assert gbs_polynomial(complete(3)).coefficients[1] == 3
    assert gbs_polynomial(complete(4)).coefficients[2] == 9
    for seed in range(5):
        g = random_graph(7, 0.5, seed)
        poly = gbs_polynomial(g)
        assert poly.coefficients[0] == 1
        assert poly.coefficients[1] == g.num_edges
        assert all(c >= 0 for c in poly.coefficients)


def test_isserlis_examples():
    assert isserlis_moment(np.eye(2), [0, 1]) == 0.0
    assert isserlis_moment(np.eye(2), [0, 0]) == 1.0
    assert isserlis_moment([[2.0, 1.0], [1.0, 2.0]], [0, 0, 1, 1]) == 6.0
    assert isserlis_moment(np.eye(3), [0, 1, 2]) == 0.0
    with pytest.raises(NotPositiveDefinite):
        isserlis_moment([[1.0, 2.0], [2.0, 1.0]], [0, 1])


def test_isserlis_distinct_indices_three_pairings():
    rng = np.random.default_rng(5)
    b = rng.normal(size=(4, 4))
    s = b @ b.T + 0.5 * np.eye(4)
    expected = s[0, 1] * s[2, 3] + s[0, 2] * s[1, 3] + s[0, 3] * s[1, 2]
    assert isserlis_moment(s, [0, 1, 2, 3]) == pytest.approx(expected, rel=1e-15)


def test_isserlis_monte_carlo_small():
    rng = np.random.default_rng(11)
    s = np.array([[2.0, 1.0], [1.0, 2.0]])
    x = rng.multivariate_normal(np.zeros(2), s, size=400_000)
    prod = x[:, 0] ** 2 * x[:, 1] ** 2
    se = prod.std() / np.sqrt(len(prod))
    assert abs(prod.mean() - 6.0) < 4 * se
