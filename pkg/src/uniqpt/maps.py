"""Representations of CP/CPTP maps and exact conversions between them.

A map can be held as a Kraus set, a process matrix in a declared operator
basis, or a Choi matrix.  With the package-wide conventions (row-major
standard basis, row-stacking vec, input system on the low-order tensor
index) the process matrix in the standard basis *is* the Choi matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import dag, frob, hermitize, unvec, vec
from .bases import OperatorBasis, standard_basis
from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    NotCPMapError,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators {A_k}; trace preserving iff sum_k A_k^+ A_k = 1."""

    ops: np.ndarray  # (K, d, d)

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None, :, :]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] == 0:
            raise InvalidArgumentError("Kraus set must be a nonempty stack of square matrices")
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def tp_residual(self) -> float:
        s = np.einsum("kba,kbc->ac", self.ops.conj(), self.ops)
        return frob(s - np.eye(self.dim))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return np.einsum("kab,bc,kdc->ad", self.ops, np.asarray(rho, complex), self.ops.conj())


@dataclass(frozen=True)
class ProcessMatrix:
    """d^2 x d^2 Hermitian matrix chi representing a CP map in ``basis``."""

    basis: OperatorBasis
    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        n = self.basis.size
        if m.shape != (n, n):
            raise DimensionMismatchError(f"process matrix must be {n}x{n}, got {m.shape}")
        if frob(m - dag(m)) > 1e-6 * max(1.0, frob(m)):
            raise InvalidArgumentError("process matrix is not Hermitian within tolerance")
        object.__setattr__(self, "mat", hermitize(m))

    @property
    def dim(self) -> int:
        return self.basis.dim

    def map_trace(self) -> float:
        """Trace of the map in the orthonormal (Choi) picture."""
        return float(np.trace(process_to_choi(self).mat).real)


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix: the process matrix in the standard basis."""

    dim: int
    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        n = self.dim * self.dim
        if m.shape != (n, n):
            raise DimensionMismatchError(f"Choi matrix must be {n}x{n}, got {m.shape}")
        if frob(m - dag(m)) > 1e-6 * max(1.0, frob(m)):
            raise InvalidArgumentError("Choi matrix is not Hermitian within tolerance")
        object.__setattr__(self, "mat", hermitize(m))

    def tp_residual(self) -> float:
        d = self.dim
        marg = np.einsum("xnxm->nm", self.mat.reshape(d, d, d, d))
        return frob(marg - np.eye(d))


@dataclass(frozen=True)
class SpectralForm:
    """Eigen-decomposition of a process matrix, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, length d^2

    def rank(self, threshold: float = 1e-8) -> int:
        return int(np.sum(self.eigenvalues > threshold))

    def reassemble(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ dag(self.eigenvectors)


@dataclass(frozen=True)
class CptpReport:
    cp: bool
    tp: bool
    min_eig: float
    tp_residual: float


def kraus_to_process(k: KrausSet, basis: OperatorBasis) -> ProcessMatrix:
    """chi_nm = sum_k a_nk a*_mk with a_nk the expansion of A_k in the basis."""
    if k.dim != basis.dim:
        raise DimensionMismatchError("Kraus operators and basis act on different dimensions")
    c = basis.coefficients(k.ops)  # (K, d^2)
    return ProcessMatrix(basis, c.T @ c.conj())


def kraus_to_choi(k: KrausSet) -> ChoiMatrix:
    v = k.ops.reshape(k.ops.shape[0], -1)
    return ChoiMatrix(k.dim, v.T @ v.conj())


def process_to_choi(p: ProcessMatrix) -> ChoiMatrix:
    c = p.basis.stacking()
    return ChoiMatrix(p.dim, c @ p.mat @ dag(c))


def choi_to_process(c: ChoiMatrix, basis: OperatorBasis) -> ProcessMatrix:
    if c.dim != basis.dim:
        raise DimensionMismatchError("Choi matrix and basis act on different dimensions")
    s = basis.stacking()
    y = np.linalg.solve(s, c.mat)
    chi = dag(np.linalg.solve(s, dag(y)))
    return ProcessMatrix(basis, chi)


def spectral_form(p: ProcessMatrix | ChoiMatrix) -> SpectralForm:
    w, v = np.linalg.eigh(p.mat)
    order = np.argsort(w)[::-1]
    return SpectralForm(w[order], v[:, order])


def _fix_phase(a: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry real positive (deterministic phase)."""
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    pivot = a[idx]
    if abs(pivot) < 1e-300:
        return a
    return a * (abs(pivot) / pivot)


def choi_to_kraus(c: ChoiMatrix, rank_tol: float = 1e-8) -> KrausSet:
    """Spectral Kraus extraction; eigenvalues below -10*eps*||chi|| are an error."""
    w, v = np.linalg.eigh(c.mat)
    floor = -10 * np.finfo(float).eps * max(frob(c.mat), 1.0)
    if w.min() < floor:
        raise NotCPMapError(f"negative eigenvalue {w.min():.3e} below tolerance {floor:.3e}")
    w = np.clip(w, 0.0, None)
    order = np.argsort(w)[::-1]
    ops = [
        _fix_phase(np.sqrt(w[i]) * unvec(v[:, i], c.dim))
        for i in order
        if w[i] > rank_tol
    ]
    if not ops:
        raise NotCPMapError("no eigenvalue above the rank tolerance")
    return KrausSet(np.array(ops))


def process_to_kraus(p: ProcessMatrix, rank_tol: float = 1e-8) -> KrausSet:
    return choi_to_kraus(process_to_choi(p), rank_tol)


def apply_map(c: ChoiMatrix, rho: np.ndarray) -> np.ndarray:
    """Act on a state through the Choi matrix."""
    rho = np.asarray(rho, dtype=complex)
    d = c.dim
    if rho.shape != (d, d):
        raise DimensionMismatchError(f"state must be {d}x{d}")
    m = c.mat @ np.kron(np.eye(d), rho.T)
    return np.einsum("xnyn->xy", m.reshape(d, d, d, d))


def _tp_tensor(basis: OperatorBasis) -> np.ndarray:
    """K[m, n] = element_m^+ element_n, cached on the basis."""
    if "tp_tensor" not in basis._cache:
        e = basis.elements
        basis._cache["tp_tensor"] = np.einsum("mba,nbc->mnac", e.conj(), e)
    return basis._cache["tp_tensor"]


def tp_image(p: ProcessMatrix) -> np.ndarray:
    """sum_{n,m} chi_nm element_m^+ element_n (identity for TP maps)."""
    return np.einsum("nm,mnac->ac", p.mat, _tp_tensor(p.basis))


def is_cptp(p: ProcessMatrix, tol: float = DEFAULT_TOL) -> CptpReport:
    w = np.linalg.eigvalsh(p.mat)
    resid = frob(tp_image(p) - np.eye(p.dim))
    return CptpReport(
        cp=bool(w.min() >= -tol),
        tp=bool(resid <= tol),
        min_eig=float(w.min()),
        tp_residual=resid,
    )


def unitary_to_choi(u: np.ndarray) -> ChoiMatrix:
    return kraus_to_choi(KrausSet(np.asarray(u, complex)[None, :, :]))


def unitary_to_process(u: np.ndarray, basis: OperatorBasis) -> ProcessMatrix:
    return kraus_to_process(KrausSet(np.asarray(u, complex)[None, :, :]), basis)


def identity_choi(d: int) -> ChoiMatrix:
    return unitary_to_choi(np.eye(d))


__all__ = [
    "KrausSet",
    "ProcessMatrix",
    "ChoiMatrix",
    "SpectralForm",
    "CptpReport",
    "kraus_to_process",
    "kraus_to_choi",
    "process_to_choi",
    "choi_to_process",
    "choi_to_kraus",
    "process_to_kraus",
    "spectral_form",
    "apply_map",
    "tp_image",
    "is_cptp",
    "unitary_to_choi",
    "unitary_to_process",
    "identity_choi",
    "standard_basis",
]
