"""Exponential integral on the negative axis and the noncentral log-moment.

``Ei(-x)`` is evaluated by its convergent series
``gamma + ln x + sum_{k>=1} (-x)^k / (k k!)`` for small ``x`` and by the
continued fraction for ``E1(x) = -Ei(-x)`` beyond that, where the alternating
series would lose digits to cancellation.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.5772156649015329

SERIES_CUTOFF = 2.0
_SERIES_MAX_TERMS = 500
_CF_MAX_ITER = 500


def ei_series_tail(x):
    """``sum_{k>=1} (-x)^k / (k k!)``, i.e. ``Ei(-x) - gamma - ln x``.

    Terms are added until they fall below ``1e-16`` of the partial sum
    (capped at 500 terms). Accurate for ``0 <= x <= SERIES_CUTOFF``.
    """
    x = np.asarray(x, dtype=float)
    term = -x.copy()  # (-x)^k / k! at k = 1
    total = term.copy()
    for k in range(2, _SERIES_MAX_TERMS + 1):
        term = term * (-x) / k
        contrib = term / k
        total = total + contrib
        if np.all(np.abs(contrib) <= 1e-16 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _e1_continued_fraction(x):
    """``E1(x)`` for ``x >= 1`` by modified Lentz on the standard fraction."""
    x = np.asarray(x, dtype=float)
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _CF_MAX_ITER + 1):
        a = -float(i * i)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h * np.exp(-x)


def exp_int_neg(x):
    """``Ei(-x)`` for ``x >= 0``, absolute error below ``1e-12``.

    ``Ei(0) = -inf``. Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("exp_int_neg needs x >= 0")
    out = np.empty_like(arr)
    zero = arr == 0
    small = (arr > 0) & (arr <= SERIES_CUTOFF)
    large = arr > SERIES_CUTOFF
    out[zero] = -np.inf
    if np.any(small):
        xs = arr[small]
        out[small] = EULER_GAMMA + np.log(xs) + ei_series_tail(xs)
    if np.any(large):
        out[large] = -_e1_continued_fraction(arr[large])
    return float(out) if out.ndim == 0 else out


def expected_log_noncentral(c):
    """``E ln|g + c|^2`` for ``g ~ CN(0, 1)``, equal to ``ln x - Ei(-x)`` with ``x = |c|^2``.

    For small ``x`` the two logarithms cancel analytically and the value is
    ``-gamma - tail(x)``, which is what gets computed.
    """
    x = np.abs(np.asarray(c)) ** 2
    out = np.empty(x.shape, dtype=float)
    small = x <= SERIES_CUTOFF
    out[small] = -EULER_GAMMA - ei_series_tail(x[small])
    big = ~small
    if np.any(big):
        out[big] = np.log(x[big]) + _e1_continued_fraction(x[big])
    return float(out) if out.ndim == 0 else out


def ei_upper_bound(x):
    """``gamma + ln x - x + x^2/4``, which dominates ``Ei(-x)`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    return EULER_GAMMA + np.log(x) - x + x * x / 4


def noncentral_lower_bound(c):
    """``-gamma + |c|^2 - |c|^4/4``."""
    x = np.abs(np.asarray(c)) ** 2
    return -EULER_GAMMA + x - x * x / 4


def log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
