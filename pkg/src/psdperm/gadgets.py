"""Gadget matrices, smooth-vector checks, replication and the permanent / 2->0 sandwich.

``E_k`` has one row per sign pattern, ``(1/sqrt k) {-1,+1}^k`` over the reals and
``(1/sqrt k) {-1,+1,-i,+i}^k`` over the complex numbers, in lexicographic order
of the alphabet as written. In expectation-normalized norms ``||E_k||_{2->2} = 1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleSmoothnessError, SizeLimitError
from .linalg import VectorSystem, as_matrix, make_rng, standard_normal
from .means import f_mean, f_mean_batch, gamma_const
from .permanent import RYSER_MAX_N, c_const, permanent_ryser
from .rounding import maximize_r
from .special import log_binomial

GADGET_MAX_K = 10
ALPHABETS = {"R": (-1.0, 1.0), "C": (-1.0, 1.0, -1j, 1j)}
MAX_ATTEMPTS = 1_000_000
PROJECTION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GadgetMatrix:
    k: int
    field: str
    rows: np.ndarray  # (d_k, k)

    @property
    def d_k(self) -> int:
        return self.rows.shape[0]

    def apply(self, x) -> np.ndarray:
        return np.asarray(x) @ self.rows.T

    def norm_22(self) -> float:
        """``||E||_{2->2}`` with both sides expectation-normalized."""
        s = np.linalg.norm(self.rows, 2)
        return float(s * math.sqrt(self.k / self.d_k))


def build_gadget(k: int, field: str = "C") -> GadgetMatrix:
    if field not in ALPHABETS:
        raise ValueError("field must be 'R' or 'C'")
    if not 1 <= k <= GADGET_MAX_K:
        raise SizeLimitError(f"gadget needs 1 <= k <= {GADGET_MAX_K}, got {k}")
    alpha = np.array(ALPHABETS[field], dtype=complex if field == "C" else float)
    idx = np.array(list(itertools.product(range(alpha.size), repeat=k)), dtype=np.int64)
    return GadgetMatrix(k, field, alpha[idx] / math.sqrt(k))


def gadget_ratio(E: GadgetMatrix, x, p: float) -> float:
    """``[E x]_{f_p} / ||x||_2`` with ``||x||_2 = ||x||_l2 / sqrt(k)``."""
    x = np.asarray(x)
    return f_mean(E.apply(x), p) / (np.linalg.norm(x) / math.sqrt(E.k))


@dataclass
class SmoothCheckReport:
    k: int
    field: str
    p: float
    delta: float
    trials: int
    attempts: int
    max_ratio: float
    min_ratio: float
    mean_ratio: float
    gamma_p: float
    margin: float  # max_ratio - gamma_p

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def smooth_vector_bound_check(k: int, field: str, p: float, delta: float, trials: int,
                              seed: int = 0, max_attempts: int = MAX_ATTEMPTS) -> SmoothCheckReport:
    """Ratios ``[E_k x]_{f_p} / ||x||_2`` over random ``delta``-smooth unit vectors.

    ``x`` is uniform on the sphere of ``F^k`` conditioned on
    ``||x||_inf <= delta ||x||_l2`` (rejection sampling). Since always
    ``||x||_inf >= ||x||_l2 / sqrt(k)``, no vector qualifies when
    ``delta sqrt(k) < 1`` and the error is raised without sampling; otherwise it
    is raised when ``max_attempts`` draws yield fewer than ``trials`` vectors.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not -1 < p < 2:
        raise ValueError("p must lie in (-1, 2)")
    if delta * math.sqrt(k) < 1:
        raise InfeasibleSmoothnessError(
            f"no vector in dimension {k} has ||x||_inf <= {delta} ||x||_l2 "
            f"(the minimum ratio is 1/sqrt(k) = {1 / math.sqrt(k):.4f})"
        )
    E = build_gadget(k, field)
    rng = make_rng(seed)
    accepted, attempts = [], 0
    batch = 4096
    while len(accepted) < trials and attempts < max_attempts:
        m = min(batch, max_attempts - attempts)
        x = standard_normal(rng, (m, k), field)
        attempts += m
        ok = np.max(np.abs(x), axis=1) <= delta * np.linalg.norm(x, axis=1)
        accepted.extend(x[ok][: trials - len(accepted)])
    if len(accepted) < trials:
        raise InfeasibleSmoothnessError(
            f"only {len(accepted)} of {trials} smooth vectors after {attempts} attempts"
        )
    X = np.array(accepted)
    ratios = f_mean_batch(X @ E.rows.T, p, axis=1) / (np.linalg.norm(X, axis=1) / math.sqrt(k))
    g = gamma_const(field, p)
    return SmoothCheckReport(
        k=k, field=field, p=p, delta=delta, trials=trials, attempts=attempts,
        max_ratio=float(ratios.max()), min_ratio=float(ratios.min()),
        mean_ratio=float(ratios.mean()), gamma_p=g, margin=float(ratios.max() - g),
    )


def replicate(V: VectorSystem, k: int) -> VectorSystem:
    """Stack ``k`` copies of the rows of ``V``; every f-mean of ``V x`` is unchanged."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return VectorSystem(np.tile(V.V, (k, 1)), V.field)


@dataclass
class EquivalenceReport:
    n: int
    d: int
    log_per: float
    log_c: float
    log_binom: float
    log_r_best: float
    lower_ok: bool
    upper_slack: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def permanent_equivalence_check(V: VectorSystem, restarts: int = 200, seed: int = 0,
                                tol: float = 1e-10) -> EquivalenceReport:
    """Compare ``per(V V^dagger)`` with ``c_{n,d} r(V)``.

    Over the complex sphere ``E prod|<v_i,x>|^2 >= r(V) / binom(n+d-1, n)``
    (the dimension of degree-n polynomials in d variables), so

        c_{n,d} r(V) / binom(n+d-1, n) <= per(V V^dagger) <= c_{n,d} r(V).

    ``r(V)`` is replaced by the best multistart witness, which keeps the lower
    inequality certifiable; ``upper_slack`` is negative only when the multistart
    missed the optimum.
    """
    n, d = V.n, V.d
    if n > RYSER_MAX_N:
        raise SizeLimitError(f"n = {n} exceeds the exact-permanent limit")
    log_per = permanent_ryser(V.gram).log_magnitude
    log_c = c_const(n, d, "C").log_magnitude
    log_binom = log_binomial(n + d - 1, n)
    log_r, _ = maximize_r(V, restarts=restarts, seed=seed, tol=tol)
    lower_ok = bool(log_per >= log_c - log_binom + log_r - 1e-9 * max(1.0, abs(log_per)))
    return EquivalenceReport(n, d, log_per, log_c, log_binom, log_r, lower_ok, log_c + log_r - log_per)


def is_projection(P, tol: float = PROJECTION_TOL) -> bool:
    P = as_matrix(P)
    if P.shape[0] != P.shape[1]:
        return False
    scale = max(1.0, float(np.linalg.norm(P, 2)))
    return (np.max(np.abs(P - P.conj().T)) <= tol * scale
            and np.max(np.abs(P @ P - P)) <= tol * scale)


def reduction_instance(P, k: int, field: str = "C") -> np.ndarray:
    """``A = (I_n kron E_k) P`` for a projection ``P`` of size ``nk``."""
    P = as_matrix(P)
    if P.shape[0] % k:
        raise ValueError(f"size {P.shape[0]} is not a multiple of k = {k}")
    if not is_projection(P):
        raise ValueError("P is not a Hermitian idempotent within 1e-9")
    n = P.shape[0] // k
    E = build_gadget(k, field)
    return np.kron(np.eye(n), E.rows) @ P


def random_projection(size: int, rank: int, rng: np.random.Generator, field: str = "C") -> np.ndarray:
    Q, _ = np.linalg.qr(standard_normal(rng, (size, rank), field))
    P = Q @ Q.conj().T
    return (P + P.conj().T) / 2


@dataclass
class ChainReport:
    rows: int
    dim: int
    log_r_A: float
    k_rep: int  # smallest replication with binom(m k' + D - 1, m k') <= exp(eps m k' / 2)
    window_per_row: float  # (log_binom at k_rep) / (m k_rep), below eps / 2
    levels: list  # Ryser-checked replication levels

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def reduction_chain_check(P, k: int, field: str = "C", eps: float = 0.1, max_exact: int = 12,
                          restarts: int = 50, seed: int = 0) -> ChainReport:
    """Numeric walk through the reduction for a tiny projection ``P``.

    Builds ``A``, estimates ``ln r(A)`` by multistart, finds the replication
    ``k'`` that squeezes the sandwich factor below ``e^{eps m k' / 2}``, and for
    every replication ``j`` with ``m j <= max_exact`` checks with Ryser that
    ``per`` of ``A^(j)`` lies in ``[c r / binom, c r]`` using ``r(A^(j)) = r(A)^j``.
    """
    A = reduction_instance(P, k, field)
    m, D = A.shape
    VA = VectorSystem(A.astype(complex), "C")
    if np.any(VA.row_norms_sq == 0):
        raise ValueError("reduction instance has a zero row; per and r(A) vanish")
    log_r, _ = maximize_r(VA, restarts=restarts, seed=seed)
    kp = 1
    while log_binomial(m * kp + D - 1, m * kp) > eps * m * kp / 2:
        kp += 1
    levels = []
    j = 1
    while m * j <= min(max_exact, RYSER_MAX_N):
        B = replicate(VA, j)
        N = m * j
        log_per = permanent_ryser(B.gram).log_magnitude
        log_c = c_const(N, D, "C").log_magnitude
        log_b = log_binomial(N + D - 1, N)
        lr = j * log_r
        levels.append({
            "replication": j,
            "log_per": log_per,
            "log_lower": log_c - log_b + lr,
            "log_upper": log_c + lr,
            "lower_ok": bool(log_per >= log_c - log_b + lr - 1e-9 * max(1.0, abs(log_per))),
            "upper_slack": log_c + lr - log_per,
        })
        j += 1
    window = log_binomial(m * kp + D - 1, m * kp) / (m * kp)
    return ChainReport(m, D, log_r, kp, window, levels)
