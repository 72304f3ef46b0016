"""Dense complex linear algebra: predicates, factorizations, Gaussian sampling.

Matrices are plain 2-D numpy arrays; ``VectorSystem`` wraps the row matrix
``V`` whose Gram matrix ``A = V V^dagger`` is the object of study.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotHermitianError, NotPSDError

HERMITIAN_RTOL = 1e-12
PSD_RTOL = 1e-9


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.iscomplexobj(m):
        m = m.astype(float)
    return m


def symmetry_defect(m) -> float:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return np.inf
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def is_hermitian(m) -> bool:
    m = as_matrix(m)
    scale = float(np.max(np.abs(m), initial=0.0))
    return symmetry_defect(m) <= HERMITIAN_RTOL * scale


def _check_hermitian(m):
    m = as_matrix(m)
    scale = float(np.max(np.abs(m), initial=0.0))
    defect = symmetry_defect(m)
    if defect > HERMITIAN_RTOL * scale:
        raise NotHermitianError(defect)
    return m


def psd_threshold(eigenvalues) -> float:
    top = float(np.max(eigenvalues, initial=0.0))
    return -PSD_RTOL * max(top, 1.0)


def is_psd(m) -> bool:
    if not is_hermitian(m):
        return False
    w = np.linalg.eigvalsh(as_matrix(m))
    return bool(w.min(initial=0.0) >= psd_threshold(w))


def hermitian_eigs(m):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Raises ``NotHermitianError`` carrying the symmetry defect otherwise.
    """
    m = _check_hermitian(m)
    # symmetrize so LAPACK sees exactly the matrix we validated
    w, u = np.linalg.eigh((m + m.conj().T) / 2)
    return w, u


def cholesky_psd(m) -> np.ndarray:
    """Factor ``L`` with ``L L^dagger = M`` for Hermitian PSD ``M``.

    Positive definite inputs get the ordinary lower-triangular Cholesky factor.
    Singular ones fall back to the eigen-factor ``U sqrt(Lambda)`` restricted
    to the nonzero spectrum, which is not triangular but satisfies the same
    reconstruction contract.
    """
    m = _check_hermitian(m)
    w, u = np.linalg.eigh((m + m.conj().T) / 2)
    if w.size and w.min() < psd_threshold(w):
        raise NotPSDError(w.min())
    if w.size and w.min() > 1e-12 * max(w.max(), 1.0):
        try:
            return np.linalg.cholesky((m + m.conj().T) / 2)
        except np.linalg.LinAlgError:
            pass
    keep = w > 1e-14 * max(float(w.max(initial=0.0)), 1.0)
    factor = np.zeros_like(u)
    factor[:, : keep.sum()] = u[:, keep] * np.sqrt(w[keep])
    return factor


def standard_normal(rng: np.random.Generator, shape, field: str = "C") -> np.ndarray:
    """I.i.d. standard entries; complex ones have E|z|^2 = 1."""
    shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
    if field == "R":
        return rng.standard_normal(shape)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


class GaussianSampler:
    """Draws from ``FN(0, Sigma)`` as ``L z`` with ``Sigma = L L^dagger``."""

    def __init__(self, factor, seed: int = 0, field: str = "C"):
        if field not in ("R", "C"):
            raise ValueError("field must be 'R' or 'C'")
        self.factor = as_matrix(factor)
        self.seed = int(seed)
        self.field = field
        self._rng = make_rng(seed)

    @classmethod
    def from_covariance(cls, cov, seed: int = 0, field: str = "C"):
        return cls(cholesky_psd(cov), seed=seed, field=field)

    @property
    def dim(self) -> int:
        return self.factor.shape[0]

    def sample(self, count: int | None = None) -> np.ndarray:
        """One vector, or a ``(count, dim)`` block of vectors."""
        k = self.factor.shape[1]
        z = standard_normal(self._rng, (1 if count is None else count, k), self.field)
        x = z @ self.factor.T
        return x[0] if count is None else x


@dataclass(frozen=True, eq=False)
class VectorSystem:
    """Rows ``v_1..v_n`` of ``V``; ``A = V V^dagger``."""

    V: np.ndarray
    field: str = "C"

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.V))
        V = V.astype(complex) if self.field == "C" else V.astype(float)
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    @property
    def n(self) -> int:
        return self.V.shape[0]

    @property
    def d(self) -> int:
        return self.V.shape[1]

    @cached_property
    def gram(self) -> np.ndarray:
        """``A = V V^dagger``."""
        return self.V @ self.V.conj().T

    @cached_property
    def row_norms_sq(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.V, self.V.conj()).real

    def inner(self, x) -> np.ndarray:
        """``<v_i, x>`` for every row; ``x`` may be a vector or a batch of rows."""
        return np.asarray(x) @ self.V.T

    def scaled(self, c) -> VectorSystem:
        return VectorSystem(self.V * c, self.field)


def random_vectors(n: int, d: int, rng: np.random.Generator, field: str = "C") -> VectorSystem:
    return VectorSystem(standard_normal(rng, (n, d), field), field)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = standard_normal(rng, (n, n), "C")
    return (z + z.conj().T) / 2


def random_psd(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    z = standard_normal(rng, (n, rank or n), "C")
    return z @ z.conj().T
