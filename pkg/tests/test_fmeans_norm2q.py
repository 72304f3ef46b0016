import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdperm.errors import DegenerateInstanceError
from psdperm.linalg import make_rng, standard_normal
from psdperm.means import PowerMean, f_mean, gamma_const, norm_2, two_concavity_gaps
from psdperm.norm2q import round_2q, solve_sdp_2q

P_VALUES = (-0.5, 0.0, 0.5, 1.0, 1.5)
vectors = st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=8).map(np.array)


def test_constant_and_geometric():
    for p in P_VALUES:
        assert f_mean(np.full(5, 3.0), p) == pytest.approx(3.0)
    assert f_mean(np.array([1.0, 4.0]), 0.0) == pytest.approx(2.0)
    assert f_mean(np.array([0.0, 4.0]), 0.0) == 0.0


def test_continuity_at_zero():
    x = np.array([0.5, 2.0, 7.0])
    assert f_mean(x, 1e-7) == pytest.approx(f_mean(x, 0.0), rel=1e-6)
    assert f_mean(x, -1e-7) == pytest.approx(f_mean(x, 0.0), rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(vectors, st.floats(0.01, 100), st.sampled_from(P_VALUES))
def test_homogeneous_and_below_l2(x, c, p):
    assert f_mean(c * x, p) == pytest.approx(c * f_mean(x, p), rel=1e-9)
    assert f_mean(x, p) <= norm_2(x) * (1 + 1e-12)


def test_power_mean_inverse():
    for p in P_VALUES:
        pm = PowerMean(p)
        x = np.array([0.3, 1.0, 2.5])
        assert np.allclose(pm.inverse(pm.f(x)), x)


def test_gamma_values():
    assert gamma_const("C", 0.0) == pytest.approx(0.749306, abs=1e-6)
    assert gamma_const("R", 1.0) == pytest.approx(math.sqrt(2 / math.pi), abs=1e-12)
    assert gamma_const("C", 2.0) == pytest.approx(1.0)
    assert gamma_const("C", 1.0) == pytest.approx(math.gamma(1.5), abs=1e-12)
    assert gamma_const("C", 1e-8) == pytest.approx(gamma_const("C", 0.0), rel=1e-7)
    g = standard_normal(make_rng(0), 1_000_000, "C")
    assert f_mean(np.abs(g), 0.5) == pytest.approx(gamma_const("C", 0.5), rel=5e-3)


def test_two_concavity_nonnegative():
    grid = np.linspace(0.01, 10, 1000)
    for p in P_VALUES:
        g1, g2 = two_concavity_gaps(p, grid)
        assert g1 >= -1e-12 and g2 >= -1e-12


def test_identity_value_is_one():
    for q in (0.0, 1.0):
        sol = solve_sdp_2q(np.eye(4), q)
        assert sol.value == pytest.approx(1.0, abs=1e-6)


def test_q_two_matches_spectral_norm():
    A = standard_normal(make_rng(1), (6, 3), "C")
    sol = solve_sdp_2q(A, 2.0)
    lam = np.linalg.eigvalsh(A.conj().T @ A)[-1]
    assert sol.value == pytest.approx(math.sqrt(3 * lam / 6), rel=1e-6)


def _grid_2q(A, q_mean, trace=2.0):
    """Two-stage grid over 2x2 PSD X with tr X = trace, maximizing q_mean(row values)."""

    def search(a_lo, a_hi, s_lo, s_hi, p_lo, p_hi, m=60):
        a = np.linspace(a_lo, a_hi, m)[:, None, None, None]
        s = np.linspace(s_lo, s_hi, m)[None, :, None, None]
        ph = np.linspace(p_lo, p_hi, m)[None, None, :, None]
        c = s * np.sqrt(np.clip(a * (trace - a), 0, None)) * np.exp(1j * ph)
        w = (np.abs(A[:, 0]) ** 2 * a + np.abs(A[:, 1]) ** 2 * (trace - a)
             + 2 * np.real(A[:, 0].conj() * A[:, 1] * c))
        vals = q_mean(np.maximum(w, 1e-300))
        k = np.unravel_index(np.argmax(vals), vals.shape)
        return vals[k], a.ravel()[k[0]], s.ravel()[k[1]], ph.ravel()[k[2]]

    best, a, s, p = search(0, trace, 0, 1, -math.pi, math.pi)
    for width in (0.1, 0.01, 0.001):
        best, a, s, p = search(max(a - width, 0), min(a + width, trace), max(s - width, 0),
                               min(s + width, 1), p - 10 * width, p + 10 * width)
    return float(best)


def test_d2_q0_matches_grid():
    A = standard_normal(make_rng(2), (5, 2), "C")
    sol = solve_sdp_2q(A, 0.0)
    grid = _grid_2q(A, lambda w: np.exp(np.mean(np.log(w), axis=-1) / 2))
    assert sol.value >= grid - 1e-9
    assert sol.value == pytest.approx(grid, abs=1e-4)


def test_one_by_one_rounding_hits_gamma():
    A = np.eye(1)
    sol = solve_sdp_2q(A, 0.0)
    rep = round_2q(A, sol, 200_000, seed=3)
    assert abs(rep.f_ratio - gamma_const("C", 0.0)) < 5 * rep.f_ratio_se
    assert rep.best_ratio <= sol.value_upper * (1 + 1e-12)


def test_zero_row_rules():
    A = np.eye(3)
    A[1] = 0
    with pytest.raises(DegenerateInstanceError):
        solve_sdp_2q(A, 0.0)
    assert solve_sdp_2q(A, 1.0).value > 0
    with pytest.raises(ValueError):
        solve_sdp_2q(A, -1.0)
