"""Interpolated randomized rounding of the SDP solution into witnesses for ``r(V)``.

A witness is any nonzero ``x``; its value

    log_r_value(x) = sum_i ln |<v_i, x>|^2 - n ln ||x||_2^2

never exceeds ``ln r(V)``, where ``||x||_2^2 = ||x||_l2^2 / d`` is the
expectation-normalized norm. The rounding draws

    x = sqrt(1 - beta) g + sqrt(beta n / tr A) sum_i s_i v_i

with ``g ~ CN(0, X*)`` and ``s_i`` uniform on the unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .bounds import lower_rate
from .linalg import VectorSystem, make_rng, standard_normal
from .logvalue import LogValue
from .sdp import SdpSolution
from .special import EULER_GAMMA


@dataclass
class RoundingSample:
    x: np.ndarray
    log_r_value: LogValue
    beta: float
    seed: int


@dataclass
class RoundingBatch:
    x: np.ndarray  # (samples, d)
    row_logs: np.ndarray  # (samples, n) ln |<v_i, x>|^2
    log_norm_sq: np.ndarray  # ln ||x||_2^2, expectation-normalized
    beta: float

    @property
    def log_r_values(self) -> np.ndarray:
        n = self.row_logs.shape[1]
        return self.row_logs.sum(axis=1) - n * self.log_norm_sq

    @property
    def mean_row_log(self) -> np.ndarray:
        """Per-sample ``(1/n) sum_i ln |<v_i, x>|^2``."""
        return self.row_logs.mean(axis=1)


def per_row_guarantee(n: int, trace: float, beta: float) -> float:
    """Lower bound on ``E (1/n) sum_i ln |<v_i, x>|^2`` for a rescaled system.

    ``-gamma + ln(1-beta) + beta/(1-beta) tr/n - 0.273 beta^2/(1-beta)^2 n/tr``.
    """
    return -EULER_GAMMA + lower_rate(trace / n, beta)


def sharp_per_row_guarantee(V: VectorSystem, beta: float) -> float:
    """The same bound before ``||A||_F^2 >= tr(A)^2 / n`` is applied; never smaller."""
    if beta == 0:
        return -EULER_GAMMA
    A = V.gram
    tr = float(np.trace(A).real)
    fro = float(np.sum(np.abs(A) ** 2))
    u = beta / (1 - beta)
    return -EULER_GAMMA + math.log1p(-beta) + u * fro / tr - 0.273 * u * u * V.n / tr


def unit_phases(rng: np.random.Generator, shape) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(shape))


def witness_log_value(V: VectorSystem, x) -> LogValue:
    x = np.asarray(x)
    mags = np.abs(V.inner(x)) ** 2
    if np.any(mags == 0):
        return LogValue.zero()
    norm_sq = float(np.vdot(x, x).real) / V.d
    return LogValue(1, float(np.sum(np.log(mags))) - V.n * math.log(norm_sq))


def interpolated_rounding(V: VectorSystem, sol: SdpSolution, beta: float, samples: int,
                          seed: int = 0) -> RoundingBatch:
    """Draw ``samples`` interpolated roundings for a rescaled system.

    ``E ||x||_l2^2 = (1-beta) tr X* + beta n = n``; with ``d = n`` this is
    ``E ||x||_2^2 = 1``.
    """
    if not 0 <= beta < 1:
        raise ValueError("beta must lie in [0, 1)")
    rng = make_rng(seed)
    n, d = V.n, V.d
    trace_A = float(np.sum(V.row_norms_sq))
    z = standard_normal(rng, (samples, sol.factor.shape[1]), "C")
    g = z @ sol.factor.T
    s = unit_phases(rng, (samples, n))
    x = math.sqrt(1 - beta) * g + math.sqrt(beta * n / trace_A) * (s @ V.V.conj())
    with np.errstate(divide="ignore"):
        row_logs = np.log(np.abs(x @ V.V.T) ** 2)
        log_norm_sq = np.log(np.sum(np.abs(x) ** 2, axis=1) / d)
    return RoundingBatch(x, row_logs, log_norm_sq, beta)


def sample_interpolated(V: VectorSystem, sol: SdpSolution, beta: float, seed: int = 0) -> RoundingSample:
    batch = interpolated_rounding(V, sol, beta, 1, seed)
    val = float(batch.log_r_values[0])
    lv = LogValue.zero() if not np.isfinite(val) else LogValue(1, val)
    return RoundingSample(batch.x[0], lv, beta, seed)


@dataclass
class MomentReport:
    emp_m2: float
    se_m2: float
    exact_m2: float
    emp_m4: float
    se_m4: float
    exact_m4: float
    m4_bound: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def moment_check(V: VectorSystem, i: int, samples: int, seed: int = 0) -> MomentReport:
    """Second and fourth moments of ``y_i = sqrt(n/tr A) sum_j s_j <v_i, v_j>``.

    Closed forms with ``a_j = <v_i, v_j>`` and ``c = n / tr A``:
    ``E|y|^2 = c sum|a_j|^2`` and ``E|y|^4 = c^2 (2 (sum|a_j|^2)^2 - sum|a_j|^4)``;
    the bound is ``1.09 c^2 ||v_i||^2``, valid when ``V^dagger V <= I``.
    """
    rng = make_rng(seed)
    A = V.gram
    c = V.n / float(np.trace(A).real)
    a = A[i]
    s = unit_phases(rng, (samples, V.n))
    y = math.sqrt(c) * (s @ a)
    p2 = np.abs(y) ** 2
    p4 = p2 ** 2
    sq = np.abs(a) ** 2
    return MomentReport(
        emp_m2=float(p2.mean()),
        se_m2=float(p2.std(ddof=1) / math.sqrt(samples)),
        exact_m2=float(c * sq.sum()),
        emp_m4=float(p4.mean()),
        se_m4=float(p4.std(ddof=1) / math.sqrt(samples)),
        exact_m4=float(c * c * (2 * sq.sum() ** 2 - np.sum(sq ** 2))),
        m4_bound=float(1.09 * c * c * V.row_norms_sq[i]),
    )


def _neg_objective(V: VectorSystem):
    n, d = V.n, V.d
    M = V.V

    def f(z):
        x = z[:d] + 1j * z[d:]
        y = M @ x
        mags = np.abs(y) ** 2
        nsq = float(np.sum(z * z))
        if np.any(mags == 0) or nsq == 0:
            return np.inf, np.zeros_like(z)
        val = float(np.sum(np.log(mags))) - n * math.log(nsq / d)
        cvec = (M / y[:, None]).sum(axis=0)
        grad = np.concatenate([2 * cvec.real, -2 * cvec.imag]) - 2 * n * z / nsq
        return -val, -grad

    return f


def maximize_r(V: VectorSystem, restarts: int = 200, seed: int = 0, tol: float = 1e-10,
               starts=None) -> tuple[float, np.ndarray]:
    """Multistart quasi-Newton maximization of ``sum_i ln|<v_i, x>|^2 - n ln ||x||_2^2``.

    The objective is scale invariant, so the sphere constraint is handled by
    normalizing at the end. Returns ``(log_r_best, x_best)`` with
    ``||x_best||_2 = 1``; ``log_r_best`` is a certified lower bound on ``ln r(V)``.
    """
    d = V.d
    if np.any(V.row_norms_sq == 0):
        return -math.inf, np.ones(d, dtype=complex)
    rng = make_rng(seed)
    f = _neg_objective(V)
    best_val, best_x = -math.inf, None
    inits = [] if starts is None else [np.asarray(s, dtype=complex) for s in starts]
    inits += list(standard_normal(rng, (restarts, d), "C"))
    for x0 in inits:
        z0 = np.concatenate([x0.real, x0.imag])
        res = minimize(f, z0, jac=True, method="L-BFGS-B",
                       options={"gtol": tol, "ftol": 1e-15, "maxiter": 2000})
        val = -float(res.fun)
        if val > best_val:
            best_val = val
            best_x = res.x[:d] + 1j * res.x[d:]
    best_x = best_x * math.sqrt(d) / np.linalg.norm(best_x)
    # recompute at the normalized point so the value is exactly a witness value
    return witness_log_value(V, best_x).log_magnitude, best_x
