"""Power means, Gaussian moment constants and the 2-concavity inequalities.

Two norm conventions coexist and are kept apart by name:

* ``norm_l2`` is the counting norm ``sqrt(sum |x_i|^2)``;
* ``f_mean`` / ``norm_p`` are expectation-normalized, ``f^{-1}(mean f(|x_i|))``,
  so ``norm_p(x, 2) == norm_l2(x) / sqrt(len(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import EULER_GAMMA


@dataclass(frozen=True)
class PowerMean:
    """The increasing power function ``f_p``: ``x^p``, ``ln x`` or ``-x^p``."""

    p: float

    @property
    def branch(self) -> str:
        if self.p > 0:
            return "positive-power"
        if self.p == 0:
            return "log"
        return "negative-power"

    def f(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            if self.p > 0:
                return x ** self.p
            if self.p == 0:
                return np.log(x)
            return -(x ** self.p)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if self.p > 0:
            return np.maximum(y, 0.0) ** (1 / self.p)
        if self.p == 0:
            return np.exp(y)
        with np.errstate(divide="ignore"):
            return (-y) ** (1 / self.p)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.p == 0:
            return 1 / x
        return abs(self.p) * x ** (self.p - 1)


def norm_l2(x) -> float:
    return float(np.linalg.norm(np.asarray(x)))


def norm_2(x) -> float:
    """Expectation-normalized 2-norm, ``sqrt(mean |x_i|^2)``."""
    x = np.asarray(x)
    return float(np.sqrt(np.mean(np.abs(x) ** 2)))


def f_mean(x, p: float) -> float:
    """``[x]_{f_p} = f_p^{-1}(mean_i f_p(|x_i|))``, the expectation-normalized p-mean.

    ``p = 0`` is the geometric mean of ``|x_i|``. For ``p <= 0`` a zero entry
    forces the limiting value 0.
    """
    a = np.abs(np.asarray(x)).ravel()
    if a.size == 0:
        raise ValueError("f_mean of an empty vector")
    if p <= 0 and np.any(a == 0):
        return 0.0
    if p == 0:
        return float(np.exp(np.mean(np.log(a))))
    # scale out the max so large exponents do not overflow
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.mean((a / m) ** p) ** (1 / p))


norm_p = f_mean


def f_mean_batch(x, p: float, axis: int = -1) -> np.ndarray:
    """``f_mean`` along one axis of an array."""
    a = np.abs(np.asarray(x))
    with np.errstate(divide="ignore"):
        if p == 0:
            return np.exp(np.mean(np.log(a), axis=axis))
        m = np.max(a, axis=axis, keepdims=True)
        safe = np.where(m == 0, 1.0, m)
        out = np.squeeze(safe, axis=axis) * np.mean((a / safe) ** p, axis=axis) ** (1 / p)
    if p < 0:
        out = np.where(np.any(a == 0, axis=axis), 0.0, out)
    return np.where(np.squeeze(m, axis=axis) == 0, 0.0, out) if p != 0 else out


def gamma_const(field: str, p: float) -> float:
    """``gamma_{F,p}``: the p-mean of ``|g|`` for a standard real or complex Gaussian.

    Real: ``(2^{p/2} Gamma((p+1)/2) / sqrt(pi))^{1/p}`` for ``p > -1``;
    complex: ``Gamma(p/2 + 1)^{1/p}`` for ``p > -2``. At ``p = 0`` the limits
    ``sqrt(e^{-gamma}/2)`` and ``sqrt(e^{-gamma})``.
    """
    if field == "R":
        if p <= -1:
            raise ValueError("real gamma constant needs p > -1")
        if p == 0:
            return math.sqrt(math.exp(-EULER_GAMMA) / 2)
        return math.exp((p / 2 * math.log(2) + math.lgamma((p + 1) / 2) - 0.5 * math.log(math.pi)) / p)
    if field == "C":
        if p <= -2:
            raise ValueError("complex gamma constant needs p > -2")
        if p == 0:
            return math.exp(-EULER_GAMMA / 2)
        return math.exp(math.lgamma(p / 2 + 1) / p)
    raise ValueError("field must be 'R' or 'C'")


def two_concavity_gaps(p: float, grid: np.ndarray):
    """Slack in the two scalar inequalities satisfied by 2-concave increasing ``f_p``.

    For every pair ``0 < y <= x`` of grid points returns the minima of
    ``(f'(y)/y) x - f'(x)`` and ``(f'(y)/(2y)) x^2 - (f(x) - f(y))``; both
    should be nonnegative for ``p <= 2``.
    """
    pm = PowerMean(p)
    grid = np.asarray(grid, dtype=float)
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    mask = Y <= X
    fx, fy = pm.f(X), pm.f(Y)
    dfx, dfy = pm.derivative(X), pm.derivative(Y)
    g1 = (dfy / Y) * X - dfx
    g2 = (dfy / (2 * Y)) * X * X - (fx - fy)
    scale1 = np.maximum(np.abs(dfy / Y * X), 1.0)
    scale2 = np.maximum(np.abs(dfy / (2 * Y) * X * X), 1.0)
    return float(np.min((g1 / scale1)[mask])), float(np.min((g2 / scale2)[mask]))
