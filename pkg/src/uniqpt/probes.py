"""Probe-state sets and POVM constructions.

Includes the generic operator-basis probe kets, MUB-derived kets, the small
probe sets whose joint commutant is trivial (so outputs pin down a unitary),
and the pure-state-informationally-complete POVM family with its truncations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import dag, frob
from .errors import (
    InfeasibleParametersError,
    InvalidArgumentError,
    InvalidDimensionError,
    UnsupportedDimensionError,
)

KIND_NC_ORDER = "nc-order"
KIND_MUB_ORDER = "mub-order"
KIND_UIC_0N = "uic-0n"
KIND_UIC_NPLUS = "uic-n+"
KIND_UIC_MIXED = "uic-mixed"
KIND_CUSTOM = "custom"


def _check_dim(d: int) -> None:
    if d < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {d}")


def _is_prime(d: int) -> bool:
    if d < 2:
        return False
    return all(d % p for p in range(2, int(d**0.5) + 1))


def ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1
    return v


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class ProbeSet:
    """Ordered input states; order is significant and preserved."""

    dim: int
    states: np.ndarray  # (K, d, d) density matrices
    labels: tuple
    kind: str = KIND_CUSTOM

    def __post_init__(self):
        st = np.asarray(self.states, dtype=complex)
        if st.ndim != 3 or st.shape[1:] != (self.dim, self.dim) or st.shape[0] == 0:
            raise InvalidArgumentError("states must be a nonempty stack of d x d matrices")
        for rho in st:
            if frob(rho - dag(rho)) > 1e-9:
                raise InvalidArgumentError("probe state is not Hermitian")
            if abs(np.trace(rho).real - 1) > 1e-9:
                raise InvalidArgumentError("probe state is not unit trace")
            if np.linalg.eigvalsh(rho).min() < -1e-9:
                raise InvalidArgumentError("probe state is not PSD")
        object.__setattr__(self, "states", st)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != st.shape[0]:
            raise InvalidArgumentError("label count does not match state count")

    def __len__(self) -> int:
        return self.states.shape[0]

    def prefix(self, k: int) -> "ProbeSet":
        return ProbeSet(self.dim, self.states[:k], self.labels[:k], self.kind)

    def gram_rank(self, tol: float = 1e-8) -> int:
        m = self.states.reshape(len(self), -1)
        s = np.linalg.svd(m, compute_uv=False)
        return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class Povm:
    """PSD effects summing to the identity."""

    dim: int
    effects: np.ndarray  # (L, d, d)
    labels: tuple
    kind: str = KIND_CUSTOM
    n_informative: int = field(default=-1)

    def __post_init__(self):
        e = np.asarray(self.effects, dtype=complex)
        if e.ndim != 3 or e.shape[1:] != (self.dim, self.dim) or e.shape[0] == 0:
            raise InvalidArgumentError("effects must be a nonempty stack of d x d matrices")
        for eff in e:
            if frob(eff - dag(eff)) > 1e-10:
                raise InvalidArgumentError("effect is not Hermitian")
            if np.linalg.eigvalsh(eff).min() < -1e-10:
                raise InvalidArgumentError("effect is not PSD within tolerance")
        if frob(e.sum(axis=0) - np.eye(self.dim)) > 1e-10:
            raise InvalidArgumentError("effects do not sum to the identity")
        object.__setattr__(self, "effects", e)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != e.shape[0]:
            raise InvalidArgumentError("label count does not match effect count")
        if self.n_informative < 0:
            object.__setattr__(self, "n_informative", e.shape[0])

    @property
    def n_effects(self) -> int:
        return self.effects.shape[0]

    def __len__(self) -> int:
        return self.n_effects


def standard_probe_kets(d: int) -> ProbeSet:
    """|k>, then (|k>+|n>)/sqrt2, then (|k>+i|n>)/sqrt2 (k outer, n inner)."""
    _check_dim(d)
    kets, labels = [], []
    for k in range(d):
        kets.append(ket(d, k))
        labels.append(f"|{k}>")
    for k in range(d - 1):
        for n in range(k + 1, d):
            kets.append((ket(d, k) + ket(d, n)) / np.sqrt(2))
            labels.append(f"|{k}>+|{n}>")
    for k in range(d - 1):
        for n in range(k + 1, d):
            kets.append((ket(d, k) + 1j * ket(d, n)) / np.sqrt(2))
            labels.append(f"|{k}>+i|{n}>")
    return ProbeSet(d, np.array([projector(v) for v in kets]), labels, KIND_NC_ORDER)


def mub_bases(d: int) -> np.ndarray:
    """d+1 mutually unbiased bases, shape (d+1, d, d); basis 0 computational.

    For odd primes basis b+1 has vectors with components
    omega^(b*m^2 + n*m)/sqrt(d); for d=2 the X and Y eigenbases are used.
    """
    if not _is_prime(d):
        raise UnsupportedDimensionError(f"MUB construction implemented for prime d, got {d}")
    out = np.zeros((d + 1, d, d), dtype=complex)
    out[0] = np.eye(d)
    if d == 2:
        out[1] = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        out[2] = np.array([[1, 1j], [1, -1j]]) / np.sqrt(2)
        return out
    omega = np.exp(2j * np.pi / d)
    m = np.arange(d)
    for b in range(d):
        for n in range(d):
            out[b + 1, n] = omega ** ((b * m * m + n * m) % d) / np.sqrt(d)
    return out


def mub_probe_kets(d: int) -> ProbeSet:
    """Computational kets, then |n;b> for b = 0..d-1, n = 0..d-2."""
    bases = mub_bases(d)
    kets = [ket(d, n) for n in range(d)]
    labels = [f"|{n}>" for n in range(d)]
    for b in range(d):
        for n in range(d - 1):
            kets.append(bases[b + 1, n])
            labels.append(f"|{n};{b}>")
    return ProbeSet(d, np.array([projector(v) for v in kets]), labels, KIND_MUB_ORDER)


def uic_pure_zero_n(d: int) -> ProbeSet:
    """|0>, then (|0>+|n>)/sqrt2 for n = 1..d-1; joint commutant is trivial."""
    _check_dim(d)
    kets = [ket(d, 0)]
    labels = ["|0>"]
    for n in range(1, d):
        kets.append((ket(d, 0) + ket(d, n)) / np.sqrt(2))
        labels.append(f"|0>+|{n}>")
    return ProbeSet(d, np.array([projector(v) for v in kets]), labels, KIND_UIC_0N)


def uic_pure_plus(d: int) -> ProbeSet:
    """|0>, ..., |d-2>, then the uniform superposition |+>."""
    _check_dim(d)
    kets = [ket(d, n) for n in range(d - 1)]
    labels = [f"|{n}>" for n in range(d - 1)]
    kets.append(np.ones(d, dtype=complex) / np.sqrt(d))
    labels.append("|+>")
    return ProbeSet(d, np.array([projector(v) for v in kets]), labels, KIND_UIC_NPLUS)


def default_mixed_spectrum(d: int) -> np.ndarray:
    lam = np.arange(d, 0, -1, dtype=float)
    return lam / lam.sum()


def uic_mixed(d: int, eigenvalues: np.ndarray | None = None) -> ProbeSet:
    """Two states: a nondegenerate diagonal mixture and the |+> projector."""
    _check_dim(d)
    lam = default_mixed_spectrum(d) if eigenvalues is None else np.asarray(eigenvalues, float)
    if lam.shape != (d,):
        raise InvalidArgumentError(f"spectrum must have {d} entries")
    if np.any(lam <= 0) or np.any(np.diff(lam) >= 0) or abs(lam.sum() - 1) > 1e-9:
        raise InvalidArgumentError("spectrum must be strictly decreasing, positive, sum to 1")
    plus = np.ones(d, dtype=complex) / np.sqrt(d)
    states = np.array([np.diag(lam).astype(complex), projector(plus)])
    return ProbeSet(d, states, ("rho0", "|+>"), KIND_UIC_MIXED)


def commutant_dimension(p: ProbeSet, tol: float = 1e-8) -> int:
    """Dimension of {X : [X, rho_j] = 0 for all j} via the stacked commutator
    super-operator's null space.  1 means the set is informationally complete
    for unitaries."""
    d = p.dim
    eye = np.eye(d)
    blocks = [np.kron(eye, rho.T) - np.kron(rho, eye) for rho in p.states]
    s = np.linalg.svd(np.vstack(blocks), compute_uv=False)
    return int(np.sum(s <= tol * max(1.0, s[0])))


def _psic_effects(d: int, ns: list[int], a: float, b: float):
    effects = [a * projector(ket(d, 0))]
    labels = ["E0"]
    eye = np.eye(d, dtype=complex)
    for n in ns:
        e = eye.copy()
        e[0, n] += 1
        e[n, 0] += 1
        effects.append(b * e)
        labels.append(f"E{n}")
    for n in ns:
        e = eye.copy()
        e[0, n] += 1j
        e[n, 0] += -1j
        effects.append(b * e)
        labels.append(f"Et{n}")
    comp = eye - sum(effects)
    w = np.linalg.eigvalsh(comp)
    if w.min() < -1e-10:
        raise InfeasibleParametersError(
            f"complement effect has eigenvalue {w.min():.3e}; pick smaller a, b"
        )
    effects.append(comp - np.diag(np.full(d, min(0.0, w.min()))))  # exact PSD clip is a no-op here
    labels.append("Ecomp")
    return effects, labels


def pure_state_povm(d: int, a: float | None = None, b: float | None = None) -> Povm:
    """2d-outcome POVM that is informationally complete for pure states.

    Effects: a|0><0|, b(1 + |0><n| + |n><0|), b(1 + i(|0><n| - |n><0|)) for
    n = 1..d-1, and the identity complement.  Defaults a = b = 1/(4d) keep the
    complement positive for every d >= 2 (Gershgorin), verified numerically.
    """
    _check_dim(d)
    if a is None:
        a = 1 / (4 * d)
    if b is None:
        b = 1 / (4 * d)
    if a <= 0 or b <= 0:
        raise InfeasibleParametersError("a and b must be positive")
    effects, labels = _psic_effects(d, list(range(1, d)), a, b)
    return Povm(d, np.array(effects), labels, kind="pure-state-ic", n_informative=2 * d)


def truncated_povm(d: int, k: int, a: float | None = None, b: float | None = None) -> Povm:
    """Pure-state POVM with the top k off-diagonal pairs dropped: 2(d-k)
    effects, counted as 2(d-k) outcomes in the sequential budget."""
    _check_dim(d)
    if not 0 <= k <= d - 1:
        raise InvalidArgumentError(f"truncation step must be in [0, {d - 1}], got {k}")
    if a is None:
        a = 1 / (4 * d)
    if b is None:
        b = 1 / (4 * d)
    if a <= 0 or b <= 0:
        raise InfeasibleParametersError("a and b must be positive")
    effects, labels = _psic_effects(d, list(range(1, d - k)), a, b)
    return Povm(d, np.array(effects), labels, kind=f"pure-state-ic-trunc{k}",
                n_informative=2 * (d - k))


def mub_povm(d: int) -> Povm:
    """All d(d+1) MUB projectors, each scaled by 1/(d+1)."""
    bases = mub_bases(d)
    effects, labels = [], []
    for b in range(d + 1):
        for n in range(d):
            effects.append(projector(bases[b, n]) / (d + 1))
            labels.append(f"|{n};b{b}>")
    return Povm(d, np.array(effects), labels, kind="mub")


__all__ = [
    "ProbeSet",
    "Povm",
    "ket",
    "projector",
    "standard_probe_kets",
    "mub_bases",
    "mub_probe_kets",
    "uic_pure_zero_n",
    "uic_pure_plus",
    "uic_mixed",
    "default_mixed_spectrum",
    "commutant_dimension",
    "pure_state_povm",
    "truncated_povm",
    "mub_povm",
]
