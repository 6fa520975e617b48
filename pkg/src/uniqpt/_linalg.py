"""Low-level linear-algebra helpers.

Conventions used throughout the package:

* ``vec`` is row-stacking: ``vec(M)[i*d + j] = M[i, j]``.
* Composite (tensor-product) indices put the *input* system in the low-order
  position, i.e. the abstract operator ``X_in (x) Y_out`` is stored as
  ``np.kron(Y_out, X_in)``.  With the row-major standard operator basis this
  makes the process matrix in the standard basis coincide entrywise with the
  Choi matrix.
* Hermitian N x N matrices are mapped isometrically to real vectors of length
  N^2 ("rvec"): the N diagonal entries, then sqrt(2) * Re and sqrt(2) * Im of
  the strict upper triangle.  Frobenius inner products are preserved.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


def vec(m: np.ndarray) -> np.ndarray:
    """Row-stacking vectorization."""
    return np.asarray(m).reshape(-1)


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d)


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


@lru_cache(maxsize=32)
def _triu_indices(n: int):
    iu, ju = np.triu_indices(n, k=1)
    return iu, ju


def herm_to_rvec(h: np.ndarray) -> np.ndarray:
    """Isometric real parameterization of a Hermitian matrix."""
    h = np.asarray(h)
    n = h.shape[0]
    iu, ju = _triu_indices(n)
    off = h[iu, ju]
    return np.concatenate(
        [h.diagonal().real, np.sqrt(2.0) * off.real, np.sqrt(2.0) * off.imag]
    )


def rvec_to_herm(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x)
    iu, ju = _triu_indices(n)
    k = iu.size
    h = np.zeros((n, n), dtype=complex)
    h[np.arange(n), np.arange(n)] = x[:n]
    off = (x[n : n + k] + 1j * x[n + k :]) / np.sqrt(2.0)
    h[iu, ju] = off
    h[ju, iu] = off.conj()
    return h


def project_psd(h: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) positive-semidefinite matrix: eigenvalue clamping."""
    h = 0.5 * (h + dag(h))
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    return (v * w) @ dag(v)


def hermitize(h: np.ndarray) -> np.ndarray:
    return 0.5 * (h + dag(h))


def psd_sqrt(h: np.ndarray, clip_tol: float = 0.0) -> np.ndarray:
    """Matrix square root of a (numerically) PSD Hermitian matrix."""
    w, v = np.linalg.eigh(hermitize(h))
    w = np.clip(w, clip_tol, None)
    return (v * np.sqrt(w)) @ dag(v)


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


class AffineProjector:
    """Euclidean projection onto ``{x : T x = t}`` with a cached factorization.

    Rank-deficient ``T`` is handled through an eigenvalue pseudo-inverse of
    ``T T^T`` so redundant constraint rows are harmless.
    """

    def __init__(self, T: np.ndarray, t: np.ndarray, rcond: float = 1e-12):
        self.T = np.asarray(T, dtype=float)
        self.t = np.asarray(t, dtype=float)
        gram = self.T @ self.T.T
        w, v = np.linalg.eigh(gram)
        keep = w > rcond * max(w.max(), 1.0)
        self._pinv_v = v[:, keep]
        self._pinv_w = w[keep]
        # consistency of t with the row space (an inconsistent system projects
        # onto the least-squares affine set; callers check residual if needed)
        self.rank = int(keep.sum())

    def __call__(self, x: np.ndarray) -> np.ndarray:
        r = self.T @ x - self.t
        y = self._pinv_v @ ((self._pinv_v.T @ r) / self._pinv_w)
        return x - self.T.T @ y

    def residual(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(self.T @ x - self.t))
