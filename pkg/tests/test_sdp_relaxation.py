import math

import numpy as np
import pytest

from psdperm.errors import CertificateError, DegenerateInstanceError
from psdperm.linalg import VectorSystem, make_rng, random_vectors
from psdperm.logvalue import LogValue
from psdperm.permanent import permanent_ryser
from psdperm.sdp import SdpConfig, SdpSolution, rescale, row_values, solve_sdp, verify_optimality


def grid_oracle_2x2(V: VectorSystem, trace: float = 2.0) -> float:
    """Max of sum ln(v^dagger X v) over 2x2 PSD X with tr X = trace, by two-stage grid search."""

    def evaluate(a, r, phi):
        X = np.zeros(a.shape + (2, 2), dtype=complex)
        c = r * np.exp(1j * phi)
        X[..., 0, 0], X[..., 1, 1] = a, trace - a
        X[..., 0, 1], X[..., 1, 0] = c, np.conj(c)
        w = np.einsum("ij,...jk,ik->...i", V.V, X, V.V.conj()).real
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.sum(np.log(np.maximum(w, 0)), axis=-1)

    def search(a_lo, a_hi, s_lo, s_hi, p_lo, p_hi, m=60):
        a = np.linspace(a_lo, a_hi, m)[:, None, None]
        s = np.linspace(s_lo, s_hi, m)[None, :, None]  # fraction of the max |c|
        p = np.linspace(p_lo, p_hi, m)[None, None, :]
        a, s, p = np.broadcast_arrays(a, s, p)
        r = s * np.sqrt(np.clip(a * (trace - a), 0, None))
        vals = evaluate(a, r, p)
        k = np.unravel_index(np.nanargmax(vals), vals.shape)
        return vals[k], a[k], s[k], p[k]

    best, a, s, p = search(0, trace, 0, 1, -math.pi, math.pi)
    for width in (0.1, 0.01, 0.001):
        best, a, s, p = search(max(a - width, 0), min(a + width, trace), max(s - width, 0),
                               min(s + width, 1), p - 10 * width, p + 10 * width)
    return float(best)


def test_identity_is_optimal():
    sol = solve_sdp(VectorSystem(np.eye(5)))
    assert sol.converged
    assert sol.log_objective.log_magnitude == pytest.approx(0.0, abs=1e-6)
    assert np.allclose(sol.X_star, np.eye(5), atol=1e-6)


def test_diag_two_one_matches_grid():
    V = VectorSystem(np.diag([2.0, 1.0]).astype(complex))
    sol = solve_sdp(V)
    assert sol.log_objective.log_magnitude == pytest.approx(math.log(4.0), abs=1e-6)
    assert sol.log_objective.log_magnitude == pytest.approx(grid_oracle_2x2(V), abs=1e-4)
    resc = rescale(V, sol)
    assert np.allclose(row_values(resc.V_tilde.V, sol.X_star), 1.0, atol=1e-6)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_d2_matches_grid(seed):
    V = random_vectors(4, 2, make_rng(seed))
    sol = solve_sdp(V)
    oracle = grid_oracle_2x2(V, trace=float(V.n))
    assert sol.log_objective.log_magnitude >= oracle - 1e-7
    assert sol.log_objective.log_magnitude == pytest.approx(oracle, abs=1e-4)


def test_objective_beats_identity_start():
    V = random_vectors(4, 2, make_rng(3))
    sol = solve_sdp(V)
    at_identity = float(np.sum(np.log(row_values(V.V, np.eye(2) * V.n / 2))))
    assert sol.log_objective.log_magnitude >= at_identity - 1e-12


def test_history_is_monotone_and_gap_certifies():
    V = random_vectors(8, 5, make_rng(4))
    sol = solve_sdp(V)
    assert sol.converged and sol.fw_gap <= 1e-8 * V.n
    assert np.all(np.diff(sol.history) >= -1e-12)
    assert np.trace(sol.X_star).real == pytest.approx(V.n)
    assert np.linalg.eigvalsh(sol.X_star).min() >= -1e-10


def test_budget_exhaustion_is_flagged():
    V = random_vectors(8, 5, make_rng(5))
    sol = solve_sdp(V, SdpConfig(tol=1e-14, max_iters=3))
    assert not sol.converged and sol.iterations == 3


def test_zero_row_is_degenerate():
    V = np.eye(3, dtype=complex)
    V[1] = 0
    with pytest.raises(DegenerateInstanceError):
        solve_sdp(VectorSystem(V))


def test_rescale_keeps_permanent_identity():
    V = random_vectors(5, 4, make_rng(6))
    sol = solve_sdp(V)
    resc = rescale(V, sol)
    lhs = permanent_ryser(V.gram).log_magnitude
    rhs = permanent_ryser(resc.V_tilde.gram).log_magnitude + resc.log_per_D.log_magnitude
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_rescale_of_normalized_is_identity():
    V = VectorSystem(np.eye(3))
    sol = solve_sdp(V)
    resc = rescale(V, sol)
    assert np.allclose(resc.D, 1.0, atol=1e-6)
    assert np.allclose(resc.V_tilde.V, V.V, atol=1e-6)


def test_optimality_on_identity():
    V = VectorSystem(np.eye(4))
    sol = solve_sdp(V)
    rep = verify_optimality(rescale(V, sol).V_tilde, sol)
    assert rep.max_eig_A == pytest.approx(1.0, abs=1e-6)
    assert rep.trace_ratio == pytest.approx(1.0, abs=1e-6)


def test_rescaled_instances_satisfy_a_below_identity():
    rng = make_rng(7)
    for _ in range(50):
        V = random_vectors(int(rng.integers(2, 9)), int(rng.integers(1, 9)), rng)
        sol = solve_sdp(V)
        rep = verify_optimality(rescale(V, sol).V_tilde, sol)
        assert rep.max_eig_A <= 1 + 1e-3
        assert rep.stationarity_residual < 1e-3


def test_certificate_failure_raises():
    V = random_vectors(6, 3, make_rng(8))
    d = 3
    X = np.diag([3.0, 2.0, 1.0]).astype(complex) * (6 / 6)
    w = row_values(V.V, X)
    fake = SdpSolution(X, np.sqrt(X), LogValue(1, float(np.sum(np.log(w)))), 0.0, w, True, 0, 6.0)
    with pytest.raises(CertificateError):
        verify_optimality(rescale(V, fake).V_tilde, fake)
