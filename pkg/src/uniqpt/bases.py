"""Operator bases for the space of d x d complex matrices.

All bases are orthonormal under the Hilbert-Schmidt inner product
``<M1, M2> = Tr(M1^+ M2)`` except the traceless-with-identity kind, whose
first element is the unnormalized identity (elements remain orthogonal).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import dag, vec
from .errors import InvalidArgumentError, InvalidDimensionError

KIND_STANDARD = "standard"
KIND_GELLMANN = "gellmann"
KIND_ROTATED = "rotated"
KIND_TRACELESS_ID = "traceless-with-identity"


@dataclass(frozen=True)
class OperatorBasis:
    """Ordered basis of d^2 complex d x d matrices.

    Immutable after construction; derived quantities (stacking matrix, Gram
    inverse, trace-preservation constraint data) are cached lazily.
    """

    dim: int
    elements: np.ndarray  # shape (d^2, d, d)
    kind: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        els = np.asarray(self.elements, dtype=complex)
        n = self.dim * self.dim
        if els.shape != (n, self.dim, self.dim):
            raise InvalidArgumentError(
                f"expected {n} elements of shape ({self.dim},{self.dim}), got {els.shape}"
            )
        object.__setattr__(self, "elements", els)
        g = self.gram()
        if self.kind == KIND_TRACELESS_ID:
            ok = np.allclose(g, np.diag(np.diag(g)), atol=1e-10)
        else:
            ok = np.allclose(g, np.eye(n), atol=1e-10)
        if not ok:
            raise InvalidArgumentError(f"elements are not orthonormal (kind={self.kind})")
        if np.linalg.matrix_rank(g) < n:
            raise InvalidArgumentError("elements do not span the operator space")

    @property
    def size(self) -> int:
        return self.dim * self.dim

    def gram(self) -> np.ndarray:
        return np.einsum("mab,nab->mn", self.elements.conj(), self.elements)

    def stacking(self) -> np.ndarray:
        """Matrix whose n-th column is vec(element n)."""
        if "stack" not in self._cache:
            self._cache["stack"] = self.elements.reshape(self.size, -1).T.copy()
        return self._cache["stack"]

    def coefficients(self, m: np.ndarray) -> np.ndarray:
        """Expansion coefficients of a matrix (or a stack of matrices)."""
        raw = np.einsum("nab,...ab->...n", self.elements.conj(), np.asarray(m, complex))
        if self.kind == KIND_TRACELESS_ID:
            return raw / np.diag(self.gram()).real
        return raw

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        return np.einsum("...n,nab->...ab", np.asarray(coeffs, complex), self.elements)


def gellmann_basis(d: int) -> OperatorBasis:
    """Generalized Gell-Mann basis: identity/sqrt(d) plus traceless Hermitian
    elements (symmetric, antisymmetric and diagonal families), all of unit
    Hilbert-Schmidt norm."""
    if d < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {d}")
    els = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            els.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / np.sqrt(2)
            a[k, j] = 1j / np.sqrt(2)
            els.append(a)
    for l in range(1, d):
        g = np.zeros((d, d), dtype=complex)
        g[np.arange(l), np.arange(l)] = 1
        g[l, l] = -l
        els.append(g / np.sqrt(l * (l + 1)))
    return OperatorBasis(d, np.array(els), KIND_GELLMANN)


def standard_basis(d: int) -> OperatorBasis:
    """Matrix units |i><j|, ordered row-major by (i, j)."""
    if d < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {d}")
    els = np.zeros((d * d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            els[i * d + j, i, j] = 1
    return OperatorBasis(d, els, KIND_STANDARD)


def rotated_basis(u_t: np.ndarray, base: OperatorBasis) -> OperatorBasis:
    """Basis {U_t * element_n}; the first element becomes proportional to U_t.

    Requires a unitary rotation and an orthonormal base whose first element is
    identity/sqrt(d), so the rotated basis singles out the target map.
    """
    u_t = np.asarray(u_t, dtype=complex)
    d = base.dim
    if u_t.shape != (d, d):
        raise InvalidArgumentError("rotation has wrong shape")
    if not np.allclose(dag(u_t) @ u_t, np.eye(d), atol=1e-9):
        raise InvalidArgumentError("rotation is not unitary")
    if not np.allclose(base.elements[0], np.eye(d) / np.sqrt(d), atol=1e-10):
        raise InvalidArgumentError("base must start with identity/sqrt(d)")
    return OperatorBasis(d, u_t[None, :, :] @ base.elements, KIND_ROTATED)


def traceless_identity_basis(d: int) -> OperatorBasis:
    """First element the (unnormalized) identity, the rest orthonormal
    traceless Hermitian matrices."""
    g = gellmann_basis(d)
    els = g.elements.copy()
    els[0] = np.eye(d)
    return OperatorBasis(d, els, KIND_TRACELESS_ID)


def basis_overlap(target: OperatorBasis, source: OperatorBasis) -> np.ndarray:
    """Matrix M with source element n = sum_m M[m, n] * target element m.

    Coefficient vectors transform as a_target = M @ a_source.
    """
    if target.dim != source.dim:
        raise InvalidArgumentError("bases act on different dimensions")
    m = target.coefficients(source.elements)  # (n_source, n_target)
    return m.T.copy()


__all__ = [
    "OperatorBasis",
    "gellmann_basis",
    "standard_basis",
    "rotated_basis",
    "traceless_identity_basis",
    "basis_overlap",
    "KIND_STANDARD",
    "KIND_GELLMANN",
    "KIND_ROTATED",
    "KIND_TRACELESS_ID",
]
