"""The log-concave relaxation ``SDP(V) = max_{X >= 0, tr X = n} prod_i v_i^dagger X v_i``.

Both this relaxation and the 2->q relaxation maximize a separable concave
function ``sum_i h(w_i)`` of the row values ``w_i = v_i^dagger X v_i`` over a
spectrahedron ``{X >= 0, tr X = T}``. ``maximize_row_concave`` solves that
family by Frank-Wolfe with exact line search. Each iteration also line-searches
along the multiplicative direction ``T G X G / tr(G X G) - X`` (``G`` the
gradient) and keeps whichever step gains more; both directions stay feasible,
so the objective never decreases, and the Frank-Wolfe gap certifies the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificateError, DegenerateInstanceError
from .linalg import VectorSystem, cholesky_psd
from .logvalue import LogValue

DEFAULT_MAX_ITERS = 50_000
LINE_SEARCH_TOL = 1e-12


@dataclass
class SdpConfig:
    tol: float | None = None  # absolute FW-gap tolerance; None means 1e-8 * n
    max_iters: int = DEFAULT_MAX_ITERS
    multiplicative: bool = True

    def resolved_tol(self, n: int) -> float:
        return 1e-8 * n if self.tol is None else float(self.tol)


@dataclass
class SdpSolution:
    X_star: np.ndarray
    factor: np.ndarray
    log_objective: LogValue
    fw_gap: float
    row_values: np.ndarray
    converged: bool
    iterations: int
    trace: float
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "log_objective": self.log_objective.log_magnitude,
            "fw_gap": self.fw_gap,
            "converged": self.converged,
            "iterations": self.iterations,
            "row_values": self.row_values.tolist(),
        }


def row_values(rows: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``w_i = v_i^dagger X v_i``, the variance of ``<v_i, g>`` for ``g ~ CN(0, X)``."""
    return np.einsum("ij,jk,ik->i", rows, X, rows.conj()).real


class RowObjective:
    """Separable concave objective ``sum_i h(w_i)``; subclasses supply ``h`` and ``h'``.

    ``gain`` returns ``sum_i h(w_i + s_i) - h(w_i)`` without the cancellation
    of subtracting two large sums.
    """

    def value(self, w):
        raise NotImplementedError

    def slope(self, w):
        raise NotImplementedError

    def gain(self, w, step):
        raise NotImplementedError


class LogRows(RowObjective):
    def value(self, w):
        with np.errstate(divide="ignore"):
            return np.log(w)

    def slope(self, w):
        with np.errstate(divide="ignore"):
            return 1.0 / w

    def gain(self, w, step):
        with np.errstate(divide="ignore"):
            return float(np.sum(np.log1p(step / w)))


def _line_search(obj: RowObjective, w, delta) -> tuple[float, float]:
    """Maximize the concave ``t -> sum h(w + t delta)`` over ``[0, 1]``.

    Returns the step and the gain over ``t = 0``.
    """
    def slope(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            s = obj.slope(w + t * delta) * delta
        s = np.where(delta == 0, 0.0, s)
        if np.any(np.isnan(s)) or np.any(s == -np.inf):
            return -np.inf
        return float(np.sum(s))

    if not slope(0.0) > 0:
        return 0.0, 0.0
    if slope(1.0) >= 0:
        t = 1.0
    else:
        lo, hi = 0.0, 1.0
        while hi - lo > LINE_SEARCH_TOL:
            mid = 0.5 * (lo + hi)
            if slope(mid) > 0:
                lo = mid
            else:
                hi = mid
        t = lo
    return t, obj.gain(w, t * delta)


def maximize_row_concave(rows, trace, obj: RowObjective, tol, max_iters, multiplicative=True):
    """Frank-Wolfe over ``{X >= 0, tr X = trace}`` for ``sum_i h(rows_i^dagger X rows_i)``.

    Rows that are identically zero must be removed by the caller.
    Returns ``(X, w, gap, converged, iterations, history)``; ``history`` holds
    the objective value after every accepted step.
    """
    rows = np.asarray(rows)
    d = rows.shape[1]
    X = np.eye(d, dtype=rows.dtype) * (trace / d)
    w = row_values(rows, X)
    value = float(np.sum(obj.value(w)))
    history = [value]
    gap = math.inf
    converged = False
    it = 0
    while True:
        gw = obj.slope(w)
        G = (rows.conj().T * gw) @ rows
        G = (G + G.conj().T) / 2
        lam, vecs = np.linalg.eigh(G)
        u = vecs[:, -1]
        gap = max(trace * lam[-1] - float(np.dot(gw, w)), 0.0)
        if gap <= tol:
            converged = True
            break
        if it >= max_iters:
            break
        it += 1

        delta_fw = trace * np.abs(rows @ u.conj()) ** 2 - w
        t_fw, gain_fw = _line_search(obj, w, delta_fw)
        t_mu, gain_mu, Y = 0.0, -math.inf, None
        if multiplicative:
            Y = G @ X @ G
            ty = np.trace(Y).real
            if ty > 0:
                Y *= trace / ty
                t_mu, gain_mu = _line_search(obj, w, row_values(rows, Y) - w)

        if t_mu > 0 and gain_mu >= gain_fw:
            X = (1 - t_mu) * X + t_mu * Y
            gain = gain_mu
        elif t_fw > 0:
            X = (1 - t_fw) * X + t_fw * trace * np.outer(u, u.conj())
            gain = gain_fw
        else:
            # no ascent along either direction at line-search resolution
            break
        X = (X + X.conj().T) / 2
        w = row_values(rows, X)
        value += gain
        history.append(value)
    return X, w, gap, converged, it, history


def solve_sdp(V: VectorSystem, cfg: SdpConfig | None = None) -> SdpSolution:
    """Maximize ``sum_i ln(v_i^dagger X v_i)`` over ``X >= 0, tr X = n``.

    The gradient is ``sum_i v_i v_i^dagger / (v_i^dagger X v_i)`` and the
    Frank-Wolfe gap equals ``n (lambda_max(G) - 1)``. A zero row makes the
    objective identically ``-inf`` and raises ``DegenerateInstanceError``.
    If the iteration budget runs out the best iterate is returned with
    ``converged=False``.
    """
    cfg = cfg or SdpConfig()
    n = V.n
    if np.any(V.row_norms_sq == 0):
        raise DegenerateInstanceError("zero row: objective identically -inf and per(A) = 0")
    X, w, gap, converged, it, history = maximize_row_concave(
        V.V, float(n), LogRows(), cfg.resolved_tol(n), cfg.max_iters, cfg.multiplicative
    )
    return SdpSolution(
        X_star=X,
        factor=cholesky_psd(X),
        log_objective=LogValue(1, float(np.sum(np.log(w)))),
        fw_gap=gap,
        row_values=w,
        converged=converged,
        iterations=it,
        trace=float(n),
        history=history,
    )


@dataclass
class Rescaled:
    V_tilde: VectorSystem
    D: np.ndarray  # diagonal entries
    log_per_D: LogValue


def rescale(V: VectorSystem, sol: SdpSolution) -> Rescaled:
    """``v~_i = v_i / sqrt(D_ii)`` with ``D_ii = v_i^dagger X* v_i``.

    ``per(A) = per(A~) * prod_i D_ii`` holds exactly for any diagonal ``D``.
    """
    D = row_values(V.V, sol.X_star)
    if np.any(D <= 1e-14):
        raise DegenerateInstanceError("row value below 1e-14: permanent is numerically zero")
    Vt = VectorSystem(V.V / np.sqrt(D)[:, None], V.field)
    return Rescaled(Vt, D, LogValue(1, float(np.sum(np.log(D)))))


@dataclass
class OptimalityReport:
    max_eig_A: float
    trace_ratio: float
    stationarity_residual: float
    slack_active: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_optimality(V_tilde: VectorSystem, sol: SdpSolution) -> OptimalityReport:
    """Check the consequences of optimality on the rescaled system.

    At an exact optimum ``A~ <= I`` and ``(I - G) X* = 0``; the residual reported
    is ``||G X* - X*||_F / ||X*||_F``. Raises ``CertificateError`` when
    ``lambda_max(A~) > 1 + 10 sqrt(fw_gap)`` (plus ``1e-12`` for rounding).
    """
    A = V_tilde.gram
    lam_max = float(np.linalg.eigvalsh((A + A.conj().T) / 2)[-1])
    trace_ratio = float(np.trace(A).real) / V_tilde.n
    w = row_values(V_tilde.V, sol.X_star)
    G = (V_tilde.V.conj().T / w) @ V_tilde.V
    X = sol.X_star
    resid = float(np.linalg.norm(G @ X - X) / np.linalg.norm(X))
    if lam_max > 1 + 10 * math.sqrt(max(sol.fw_gap, 0.0)) + 1e-12:
        raise CertificateError(
            f"lambda_max(A~) = {lam_max:.12g} exceeds 1 + 10 sqrt(gap); solver not converged"
        )
    return OptimalityReport(lam_max, trace_ratio, resid, lam_max > 1.0)
