import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdperm.errors import SizeLimitError
from psdperm.linalg import VectorSystem, make_rng, random_vectors, standard_normal
from psdperm.permanent import (c_const, permanent_naive, permanent_rank1, permanent_ryser,
                               wick_estimate, wick_sphere_estimate)


def test_identity_and_ones():
    assert permanent_ryser(np.eye(5)).log_magnitude == pytest.approx(0.0, abs=1e-14)
    # per(J_n) = n!
    assert permanent_ryser(np.ones((6, 6))).log_magnitude == pytest.approx(math.lgamma(7))


def test_two_by_two():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert permanent_ryser(A).value == pytest.approx(10.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10 ** 6))
def test_ryser_matches_naive(n, seed):
    A = standard_normal(make_rng(seed), (n, n), "C")
    a, b = permanent_ryser(A).value, permanent_naive(A).value
    assert abs(a - b) <= 1e-10 * max(abs(b), 1e-12)


def test_ryser_large_n_uses_block_path():
    # 14 columns exercise the split subset-sum/Gray-code enumeration
    A = np.eye(14) + 0.01 * np.ones((14, 14))
    lv = permanent_ryser(A)
    assert lv.sign == 1 and lv.log_magnitude > 0


def test_size_limits():
    with pytest.raises(SizeLimitError):
        permanent_naive(np.eye(9))
    with pytest.raises(SizeLimitError):
        permanent_ryser(np.eye(25))


def test_zero_row_gives_zero():
    A = np.eye(4)
    A[2] = 0
    assert permanent_ryser(A).is_zero


def test_rank_one_closed_form():
    rng = make_rng(8)
    V = random_vectors(5, 3, rng)
    z = standard_normal(rng, 3)
    u = V.V @ z
    A = np.outer(u, u.conj())
    assert permanent_rank1(V, z).log_magnitude == pytest.approx(permanent_ryser(A).log_magnitude, abs=1e-10)


def test_c_const_small_cases():
    assert c_const(1, 1).log_magnitude == pytest.approx(0.0)
    # complex: (d+n-1)! / ((d-1)! d^n)
    assert c_const(3, 2).value == pytest.approx(math.factorial(4) / (1 * 8))


def test_wick_estimate_within_five_se():
    V = random_vectors(4, 3, make_rng(9))
    est = wick_estimate(V, 400_000, seed=1)
    exact = permanent_ryser(V.gram).value.real
    assert abs(est.estimate.value - exact) <= 5 * est.std_error


def test_wick_sphere_estimate_within_five_se():
    V = random_vectors(3, 3, make_rng(10))
    est = wick_sphere_estimate(V, 400_000, seed=2)
    exact = permanent_ryser(V.gram).value.real
    assert abs(est.estimate.value - exact) <= 5 * est.std_error


def test_wick_is_seed_deterministic():
    V = random_vectors(3, 2, make_rng(11))
    assert wick_estimate(V, 1000, seed=4).estimate == wick_estimate(V, 1000, seed=4).estimate


@pytest.mark.parametrize("n", [2, 4, 6])
def test_identity_plus_b_is_sum_of_principal_minors(n):
    rng = make_rng(40 + n)
    B = standard_normal(rng, (n, n), "C")
    total = 1.0 + 0j  # empty minor
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            total += permanent_ryser(B[np.ix_(S, S)]).value
    got = permanent_ryser(np.eye(n) + B).value
    assert abs(got - total) <= 1e-9 * max(1.0, abs(total))
