"""The 2->q relaxation and its Gaussian rounding.

All norms here are expectation-normalized: for ``A`` with ``n`` rows and ``d``
columns, ``||x||_2^2 = ||x||_l2^2 / d`` and ``||Ax||_q = f_mean(Ax, q)``. The
relaxation is

    SDP_2q(A) = f_q^{-1}( max_{X >= 0, tr X = d} mean_i f_q(sqrt(a_i^dagger X a_i)) )

which upper-bounds ``||A||_{2->q}``; Gaussian rounding recovers a
``gamma_{F,q}`` fraction of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInstanceError
from .linalg import as_matrix, cholesky_psd, make_rng, standard_normal
from .logvalue import LogValue
from .means import PowerMean, f_mean_batch, gamma_const
from .sdp import RowObjective, SdpConfig, SdpSolution, maximize_row_concave

Q_MIN, Q_MAX = -1.0, 2.0


class PowerRows(RowObjective):
    """``h(w) = f_q(sqrt(w)) / n``, concave in ``w`` for ``q <= 2``."""

    def __init__(self, q: float, n: int):
        self.q = float(q)
        self.n = n

    def value(self, w):
        with np.errstate(divide="ignore"):
            if self.q == 0:
                return 0.5 * np.log(w) / self.n
            sign = 1.0 if self.q > 0 else -1.0
            return sign * w ** (self.q / 2) / self.n

    def slope(self, w):
        with np.errstate(divide="ignore"):
            if self.q == 0:
                return 0.5 / (w * self.n)
            return abs(self.q) / 2 * w ** (self.q / 2 - 1) / self.n

    def gain(self, w, step):
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.log1p(step / w)
            if self.q == 0:
                return float(np.sum(0.5 * r)) / self.n
            sign = 1.0 if self.q > 0 else -1.0
            return sign * float(np.sum(w ** (self.q / 2) * np.expm1(self.q / 2 * r))) / self.n


@dataclass
class Norm2qSolution(SdpSolution):
    q: float = 0.0
    value: float = 0.0
    value_upper: float = 0.0  # f_q^{-1}(objective + gap), a certified bound on the true optimum

    def to_dict(self) -> dict:
        return {**super().to_dict(), "q": self.q, "sdp_value": self.value,
                "sdp_value_upper": self.value_upper}


def _check_q(q: float) -> None:
    if not Q_MIN < q <= Q_MAX:
        raise ValueError("q must lie in (-1, 2]")


def solve_sdp_2q(A, q: float, cfg: SdpConfig | None = None) -> Norm2qSolution:
    """Solve the 2->q relaxation for the rows of ``A``.

    Zero rows are rejected for ``q <= 0`` (the objective is ``-inf``); for
    ``q > 0`` they contribute ``f_q(0) = 0`` and are left out of the iteration.
    The default gap tolerance is ``1e-8``: the objective is a mean, so this
    matches the per-row tolerance of the log relaxation.
    ``q = 2`` is allowed as a cross-check: the value is then
    ``sqrt(d lambda_max(A^dagger A) / n)``.
    """
    _check_q(q)
    cfg = cfg or SdpConfig(tol=1e-8)
    A = as_matrix(A)
    n, d = A.shape
    norms = np.sum(np.abs(A) ** 2, axis=1)
    live = norms > 0
    if q <= 0 and not np.all(live):
        raise DegenerateInstanceError("zero row with q <= 0: objective is -inf")
    if not np.any(live):
        X = np.eye(d, dtype=complex)
        w = np.zeros(n)
        return Norm2qSolution(X, cholesky_psd(X), LogValue.zero(), 0.0, w, True, 0, float(d),
                              [], q=q, value=0.0, value_upper=0.0)
    obj = PowerRows(q, n)
    X, w_live, gap, converged, it, history = maximize_row_concave(
        A[live], float(d), obj, cfg.tol if cfg.tol is not None else 1e-8, cfg.max_iters,
        cfg.multiplicative,
    )
    if q <= 0 and np.min(w_live) < 1e-14:
        raise DegenerateInstanceError("row value below 1e-14 with q <= 0")
    w = np.zeros(n)
    w[live] = w_live
    # mean_i f_q(sqrt w_i); zero rows add f_q(0) = 0 for q > 0
    mean_f = float(np.sum(obj.value(w_live)))
    pm = PowerMean(q)
    value = float(pm.inverse(mean_f))
    # concavity: the optimum exceeds the iterate by at most the Frank-Wolfe gap
    value_upper = float(pm.inverse(mean_f + gap))
    return Norm2qSolution(
        X_star=X,
        factor=cholesky_psd(X),
        log_objective=LogValue.from_value(value),
        fw_gap=gap,
        row_values=w,
        converged=converged,
        iterations=it,
        trace=float(d),
        history=history,
        q=q,
        value=value,
        value_upper=value_upper,
    )


@dataclass
class Rounding2qReport:
    q: float
    field: str
    sdp_value: float
    gamma_q: float
    samples: int
    best_ratio: float  # max over draws of ||Ax||_q / ||x||_2, a lower bound on ||A||_{2->q}
    best_witness: np.ndarray
    mean_ratio: float  # sqrt(mean ||Ax||_q^2 / mean ||x||_2^2) over the SDP value
    mean_ratio_se: float
    f_ratio: float  # pooled f-mean over draws and rows of |Ax|, over the SDP value
    f_ratio_se: float
    draw_ratio_mean: float  # plain average of per-draw ||Ax||_q / ||x||_2 over the SDP value
    draw_ratio_se: float

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["best_witness"] = [[float(z.real), float(z.imag)] for z in self.best_witness]
        return d


def _pooled_f_ratio(Y, q: float) -> tuple[float, float]:
    """Pooled ``f_q``-mean of ``|Y|`` over all draws and rows, with a delta-method standard error."""
    a = np.abs(Y)
    per_draw = np.mean(PowerMean(q).f(a), axis=1)  # i.i.d. across draws
    m = float(per_draw.mean())
    se_f = float(per_draw.std(ddof=1) / math.sqrt(per_draw.size))
    pm = PowerMean(q)
    val = float(pm.inverse(m))
    # d f^{-1}(m)/dm = 1 / f'(f^{-1}(m))
    deriv = 1.0 / float(pm.derivative(val)) if val > 0 else math.inf
    return val, se_f * deriv


def _ratio_of_means(num, den) -> tuple[float, float]:
    """``sqrt(mean num / mean den)`` and its delta-method standard error."""
    N = num.size
    mn, md = float(num.mean()), float(den.mean())
    R = math.sqrt(mn / md)
    cov = np.cov(np.vstack([num, den]), ddof=1) / N
    grad = np.array([1 / md, -mn / md ** 2]) / (2 * R)
    return R, float(math.sqrt(max(grad @ cov @ grad, 0.0)))


def round_2q(A, sol: Norm2qSolution, samples: int, seed: int = 0, field: str = "C",
             chunk: int = 100_000) -> Rounding2qReport:
    """Gaussian rounding ``x ~ FN(0, X*)`` of a 2->q solution.

    ``E f_q(|<a_i, x>|) = f_q(gamma_{F,q} sqrt(w_i))`` row by row, so the pooled
    ``f_q``-mean of ``|Ax|`` over draws and rows (``f_ratio``) estimates
    exactly ``gamma_{F,q}``. By Jensen the mean rounded value
    ``sqrt(E ||Ax||_q^2 / E ||x||_2^2)`` is at least that, and it lower-bounds
    ``||A||_{2->q}``; ``mean_ratio`` reports it relative to the SDP value.
    """
    A = as_matrix(A)
    n, d = A.shape
    q = sol.q
    rng = make_rng(seed)
    Ys, ratios, num, den, best = [], [], [], [], (-math.inf, None)
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        z = standard_normal(rng, (m, sol.factor.shape[1]), field)
        x = z @ sol.factor.T
        Y = x @ A.T
        norm2 = np.sqrt(np.sum(np.abs(x) ** 2, axis=1) / d)
        yq = f_mean_batch(Y, q, axis=1)
        r = yq / norm2
        num.append(yq ** 2)
        den.append(norm2 ** 2)
        k = int(np.argmax(r))
        if r[k] > best[0]:
            best = (float(r[k]), x[k] / norm2[k])
        Ys.append(Y)
        ratios.append(r)
        done += m
    Y = np.concatenate(Ys)
    r = np.concatenate(ratios)
    pooled, pooled_se = _pooled_f_ratio(Y, q)
    lem, lem_se = _ratio_of_means(np.concatenate(num), np.concatenate(den))
    sdp = sol.value
    return Rounding2qReport(
        q=q,
        field=field,
        sdp_value=sdp,
        gamma_q=gamma_const(field, q),
        samples=samples,
        best_ratio=best[0],
        best_witness=best[1],
        mean_ratio=lem / sdp,
        mean_ratio_se=lem_se / sdp,
        f_ratio=pooled / sdp,
        f_ratio_se=pooled_se / sdp,
        draw_ratio_mean=float(r.mean()) / sdp,
        draw_ratio_se=float(r.std(ddof=1) / math.sqrt(samples)) / sdp,
    )
