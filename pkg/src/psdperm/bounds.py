"""Trace-based upper and lower bounds on PSD permanents, and the estimator built on them.

After the SDP rescaling, ``A~ <= I`` and ``tr(A~) = (1 - eps) n``. Then

    per(A~) <= (1 - eps^2/20)^n
    per(A~) >= e^{-(gamma+1) n} exp(n * ell(tr/n))

with ``ell(x) = max_beta ln(1-beta) + beta x/(1-beta) - 0.273 beta^2 / ((1-beta)^2 x)``.
The estimator outputs the upper bound. All values are natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .linalg import VectorSystem, hermitian_eigs
from .logvalue import LogValue
from .sdp import SdpConfig, rescale, solve_sdp, verify_optimality
from .special import EULER_GAMMA

BETA_STAR = 0.34
MOMENT_CONST = 0.273
UPPER_DIVISOR = 20.0
TRACE_SLACK = 1e-9
_GOLDEN = (math.sqrt(5) - 1) / 2
BETA_MAX = 1 - 1e-6


def upper_bound_trace(n: int, trace: float) -> LogValue:
    """``n ln(1 - eps^2/20)`` with ``eps = 1 - trace/n``, for ``0 <= A <= I``."""
    if trace > n * (1 + TRACE_SLACK):
        raise ValueError(f"trace {trace} exceeds n = {n}; contradicts A <= I")
    if trace < -TRACE_SLACK * n:
        raise ValueError("trace must be nonnegative")
    trace = min(max(trace, 0.0), float(n))
    eps = 1.0 - trace / n
    return LogValue(1, n * math.log1p(-eps * eps / UPPER_DIVISOR))


def upper_rate(x: float) -> float:
    """``r(x) = ln(1 - (1-x)^2/20)``: per-row log upper bound at trace ratio ``x``."""
    return math.log1p(-((1 - x) ** 2) / UPPER_DIVISOR)


def upper_bound_spectral(A, t: float | None = None) -> LogValue:
    """``n ln t - sum_{lambda_i > t} ln(2 - lambda_i/t)`` for ``0 <= A <= I``.

    This is the intermediate bound ``t^n / det(I - B)``; ``t`` defaults to
    ``1 - eps/5``, which makes it no larger than ``upper_bound_trace``.
    """
    lam, _ = hermitian_eigs(A)
    n = lam.size
    if lam[-1] > 1 + TRACE_SLACK or lam[0] < -TRACE_SLACK * max(1.0, lam[-1]):
        raise ValueError(f"need 0 <= A <= I, spectrum is [{lam[0]:.3g}, {lam[-1]:.3g}]")
    lam = np.clip(lam, 0.0, 1.0)
    if t is None:
        eps = 1.0 - float(np.sum(lam)) / n
        t = 1.0 - eps / 5
    if not 0.5 < t <= 1.0:
        raise ValueError("t must lie in (1/2, 1]")
    big = lam[lam > t]
    return LogValue(1, n * math.log(t) - float(np.sum(np.log(2.0 - big / t))))


def lower_rate(x: float, beta: float) -> float:
    """Per-row exponent ``ln(1-beta) + beta x/(1-beta) - 0.273 beta^2/((1-beta)^2 x)``."""
    if beta == 0:
        return 0.0
    u = beta / (1 - beta)
    return math.log1p(-beta) + u * x - MOMENT_CONST * u * u / x


def lower_bound(n: int, trace: float, beta: float) -> LogValue:
    """``-(gamma+1) n + n * lower_rate(trace/n, beta)``."""
    if not 0 <= beta < 1:
        raise ValueError("beta must lie in [0, 1)")
    if trace <= 0:
        raise ValueError("trace must be positive")
    return LogValue(1, -(EULER_GAMMA + 1) * n + n * lower_rate(trace / n, beta))


def optimize_beta(trace_ratio: float, grid: int = 2001) -> tuple[float, float]:
    """Best ``beta`` in ``[0, 1 - 1e-6]`` for ``lower_rate(trace_ratio, .)``.

    The rate is not unimodal in ``beta`` for every ratio, so a grid scan picks
    the bracket and golden-section search refines it to ``1e-10``; the
    ``beta = 0`` value (zero) is a floor. Returns ``(beta_star, rate)``.
    """
    x = float(trace_ratio)
    if not 0 < x:
        return 0.0, 0.0
    betas = np.linspace(0.0, BETA_MAX, grid)
    u = betas / (1 - betas)
    vals = np.log1p(-betas) + u * x - MOMENT_CONST * u * u / x
    k = int(np.argmax(vals))
    a, b = betas[max(k - 1, 0)], betas[min(k + 1, grid - 1)]

    def f(beta):
        return lower_rate(x, beta)

    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-10:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    best = max([(0.0, 0.0), (float(betas[k]), float(vals[k])), (c, fc), (d, fd)], key=lambda p: p[1])
    return float(best[0]), float(best[1])


def lower_rate_fixed(x: float, beta: float = BETA_STAR) -> float:
    """``max(0, lower_rate(x, beta))``, with the ``x -> 0`` limit equal to 0."""
    if x <= 0:
        return 0.0
    return max(0.0, lower_rate(x, beta))


def verify_gap_grid(step: float = 1e-4, beta: float = BETA_STAR) -> float:
    """Minimum over an ``x``-grid of ``[0, 1]`` of ``lower_rate_fixed(x) - upper_rate(x)``.

    This is the per-row exponent by which the lower and upper bounds are
    closer than ``gamma + 1``; a positive minimum means the estimator beats the
    ``e^{-(gamma+1)n}`` ratio uniformly.
    """
    if step > 1e-3:
        raise ValueError("step must be <= 1e-3")
    m = int(round(1.0 / step))
    x = np.linspace(0.0, 1.0, m + 1)
    up = np.log1p(-((1 - x) ** 2) / UPPER_DIVISOR)
    lo = np.zeros_like(x)
    pos = x > 0
    u = beta / (1 - beta)
    lo[pos] = np.maximum(0.0, math.log1p(-beta) + u * x[pos] - MOMENT_CONST * u * u / x[pos])
    return float(np.min(lo - up))


@dataclass
class BoundsReport:
    n: int
    trace_ratio: float
    eps: float
    beta_star: float
    log_lower: float
    log_upper: float
    log_estimate: float
    log_per_D: float
    max_eig_A: float = 1.0
    fw_gap: float = 0.0
    converged: bool = True
    slack_active: bool = False
    exact_zero: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def bounds_from_rescaled(n: int, trace: float, max_eig: float = 1.0, log_per_D: float = 0.0):
    """Lower/upper log-bounds for ``per(A)`` given the rescaled trace and top eigenvalue.

    When numerical slack leaves ``lambda_max(A~) = L > 1`` the upper bound is
    applied to ``A~ / L`` and multiplied back by ``L^n``, so it stays valid.
    Returns ``(log_lower, log_upper, trace_ratio, beta_star)``.
    """
    L = max(1.0, max_eig)
    ratio = min(max(trace / n, 1e-300), 1.0)
    upper = n * math.log(L) + upper_bound_trace(n, min(trace / L, float(n))).log_magnitude
    beta, rate = optimize_beta(ratio)
    lower = -(EULER_GAMMA + 1) * n + n * rate
    return lower + log_per_D, upper + log_per_D, ratio, beta


def approximate_permanent(V: VectorSystem, cfg: SdpConfig | None = None) -> BoundsReport:
    """Solve the relaxation, rescale, certify ``A~ <= I`` and report bounds on ``per(V V^dagger)``.

    Bounds refer to the original matrix (``log_per_D`` is added back). A zero
    row short-circuits to the exact answer 0.
    """
    n = V.n
    if np.any(V.row_norms_sq == 0):
        return BoundsReport(n, 0.0, 1.0, 0.0, -math.inf, -math.inf, -math.inf, -math.inf,
                            exact_zero=True)
    sol = solve_sdp(V, cfg)
    resc = rescale(V, sol)
    opt = verify_optimality(resc.V_tilde, sol)
    trace = float(np.trace(resc.V_tilde.gram).real)
    lpd = resc.log_per_D.log_magnitude
    lower, upper, ratio, beta = bounds_from_rescaled(n, trace, opt.max_eig_A, lpd)
    if lower > upper:
        raise AssertionError("lower bound above upper bound")
    return BoundsReport(
        n=n,
        trace_ratio=ratio,
        eps=1.0 - ratio,
        beta_star=beta,
        log_lower=lower,
        log_upper=upper,
        log_estimate=upper,
        log_per_D=lpd,
        max_eig_A=opt.max_eig_A,
        fw_gap=sol.fw_gap,
        converged=sol.converged,
        slack_active=opt.slack_active,
    )


def upper_inequality_gap(eps):
    """``(1 - eps^2/20) - (1-eps/5)^{2-eps/2} / (1-2eps/5)^{1-eps/2}``; nonnegative on ``[0, 1]``."""
    eps = np.asarray(eps, dtype=float)
    lhs = (1 - eps / 5) * (1 - eps / 5) ** (1 - eps / 2) / (1 - 2 * eps / 5) ** (1 - eps / 2)
    return (1 - eps * eps / UPPER_DIVISOR) - lhs
