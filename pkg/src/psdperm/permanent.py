"""Exact permanents and the Wick-formula Monte Carlo estimator."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SizeLimitError
from .linalg import VectorSystem, as_matrix, make_rng, standard_normal
from .logvalue import LogValue, log_sum

NAIVE_MAX_N = 8
RYSER_MAX_N = 24
_RYSER_BLOCK_BITS = 12


def _square(A) -> np.ndarray:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got {A.shape}")
    return A


def _row_scale(A):
    """Split ``A = diag(s) B`` with rows of ``B`` of max-modulus 1."""
    s = np.max(np.abs(A), axis=1)
    if np.any(s == 0):
        return None, None
    return A / s[:, None], float(np.sum(np.log(s)))


@lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)


def permanent_naive(A) -> LogValue:
    """Sum over all ``n!`` permutations. Limited to ``n <= 8``."""
    A = _square(A)
    n = A.shape[0]
    if n > NAIVE_MAX_N:
        raise SizeLimitError(f"permanent_naive supports n <= {NAIVE_MAX_N}, got {n}")
    if n == 0:
        return LogValue.one()
    perms = _permutations(n)
    terms = np.prod(A[np.arange(n), perms], axis=1)
    return LogValue.from_value(complex(np.sum(terms)))


def _subset_sums(cols: np.ndarray) -> np.ndarray:
    """Row sums for every subset of the given columns, indexed by bitmask."""
    n, m = cols.shape
    table = np.zeros((1 << m, n), dtype=cols.dtype)
    for b in range(m):
        lo = 1 << b
        table[lo : 2 * lo] = table[:lo] + cols[:, b]
    return table


def _popcount_parity(m: int) -> np.ndarray:
    idx = np.arange(1 << m, dtype=np.int64)
    par = np.zeros(idx.shape, dtype=np.int64)
    while np.any(idx):
        par ^= idx & 1
        idx >>= 1
    return par


def permanent_ryser(A) -> LogValue:
    """Ryser inclusion-exclusion, ``O(2^n n)``. Limited to ``n <= 24``.

    The low columns are tabulated once; the high columns are walked in Gray
    code order with a running row sum, and the per-block partial sums are
    combined with Kahan compensation.
    """
    A = _square(A)
    n = A.shape[0]
    if n > RYSER_MAX_N:
        raise SizeLimitError(f"permanent_ryser supports n <= {RYSER_MAX_N}, got {n}")
    if n == 0:
        return LogValue.one()
    B, log_scale = _row_scale(A.astype(complex))
    if B is None:
        return LogValue.zero()

    m = min(n, _RYSER_BLOCK_BITS)
    low = _subset_sums(B[:, :m])
    low_sign = 1.0 - 2.0 * _popcount_parity(m)  # (-1)^{|S_low|}
    high = B[:, m:]
    h = n - m

    total = 0j
    comp = 0j
    running = np.zeros(n, dtype=complex)
    high_parity = 0
    for k in range(1 << h):
        if k:
            bit = (k & -k).bit_length() - 1
            gray = k ^ (k >> 1)
            if gray >> bit & 1:
                running += high[:, bit]
            else:
                running -= high[:, bit]
            high_parity ^= 1
        block = np.dot(low_sign, np.prod(low + running, axis=1))
        if high_parity:
            block = -block
        y = block - comp
        t = total + y
        comp = (t - total) - y
        total = t
    if n % 2:
        total = -total
    out = LogValue.from_value(total)
    if out.is_zero:
        return out
    return LogValue(out.sign, out.log_magnitude + log_scale, out.phase)


def permanent(A) -> LogValue:
    """Exact permanent by the fastest applicable oracle."""
    return permanent_ryser(A)


def permanent_rank1(V: VectorSystem, z) -> LogValue:
    """``per(V z z^dagger V^dagger) = n! * prod_i |<z, v_i>|^2``."""
    z = np.asarray(z)
    if z.shape != (V.d,):
        raise ValueError(f"z must have dimension {V.d}, got shape {z.shape}")
    mags = np.abs(V.inner(z)) ** 2
    if np.any(mags == 0):
        return LogValue.zero()
    return LogValue(1, math.lgamma(V.n + 1) + float(np.sum(np.log(mags))))


def c_const(n: int, d: int, field: str = "C") -> LogValue:
    """Proportionality constant between Gaussian and sphere moments.

    Complex: ``(d+n-1)! / ((d-1)! d^n)``; real: ``Gamma(n+d/2) / (Gamma(d/2) (d/2)^n)``.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if field == "C":
        return LogValue(1, math.lgamma(d + n) - math.lgamma(d) - n * math.log(d))
    if field == "R":
        return LogValue(1, math.lgamma(n + d / 2) - math.lgamma(d / 2) - n * math.log(d / 2))
    raise ValueError("field must be 'R' or 'C'")


@dataclass(frozen=True)
class WickEstimate:
    estimate: LogValue
    std_error: float
    log_std_error: float
    samples: int

    def to_dict(self) -> dict:
        return {**self.estimate.to_dict(), "std_error": self.std_error,
                "log_std_error": self.log_std_error, "samples": self.samples}


def _log_products(V: VectorSystem, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.sum(np.log(np.abs(x @ V.V.T) ** 2), axis=1)


def _mean_from_logs(logs: np.ndarray, log_prefactor: float = 0.0) -> WickEstimate:
    N = logs.size
    mean = log_sum(logs)
    if mean.is_zero:
        return WickEstimate(LogValue.zero(), 0.0, -math.inf, N)
    shift = float(np.max(logs[np.isfinite(logs)]))
    w = np.exp(logs - shift)
    sd = float(np.std(w, ddof=1)) if N > 1 else 0.0
    log_se = (math.log(sd) + shift - 0.5 * math.log(N) + log_prefactor) if sd > 0 else -math.inf
    est = LogValue(1, mean.log_magnitude - math.log(N) + log_prefactor)
    se = math.exp(log_se) if log_se < 709 else math.inf
    return WickEstimate(est, se, log_se, N)


def wick_estimate(V: VectorSystem, samples: int, seed: int = 0, chunk: int = 200_000) -> WickEstimate:
    """Monte Carlo ``E_{x ~ CN(0, I)} prod_i |<v_i, x>|^2``, which equals ``per(V V^dagger)``."""
    rng = make_rng(seed)
    logs = []
    left = int(samples)
    while left > 0:
        m = min(chunk, left)
        logs.append(_log_products(V, standard_normal(rng, (m, V.d), "C")))
        left -= m
    return _mean_from_logs(np.concatenate(logs))


def wick_sphere_estimate(V: VectorSystem, samples: int, seed: int = 0, chunk: int = 200_000) -> WickEstimate:
    """``c_{n,d} * E_{||x||_2 = 1} prod_i |<v_i, x>|^2`` over the normalized sphere.

    ``||x||_2 = 1`` in the expectation-normalized sense, i.e. ``||x||_l2^2 = d``.
    Uniform sphere points are normalized complex Gaussians.
    """
    rng = make_rng(seed)
    logs = []
    left = int(samples)
    while left > 0:
        m = min(chunk, left)
        g = standard_normal(rng, (m, V.d), "C")
        g *= np.sqrt(V.d) / np.linalg.norm(g, axis=1, keepdims=True)
        logs.append(_log_products(V, g))
        left -= m
    return _mean_from_logs(np.concatenate(logs), c_const(V.n, V.d, "C").log_magnitude)
