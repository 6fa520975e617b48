"""Design matrices, outcome probabilities, and the Gaussian-noise simulator.

For probe rho_j, effect E_l and basis {Y_n} the design matrix has entries
D_jl[m, n] = Tr(rho_j Y_n^+ E_l Y_m), and p_jl = Tr(D_jl^+ chi).  D_jl^+ is
Hermitian, so p is a real inner product of the rvec parameterizations; in the
standard basis D_jl^+ equals rho_j^T (x) E_l entrywise.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from ._linalg import dag, herm_to_rvec
from .errors import DimensionMismatchError, InconsistentInputsError, InvalidArgumentError
from .maps import ProcessMatrix
from .probes import Povm, ProbeSet
from .serialize import read_csv, write_csv


@dataclass(frozen=True)
class DesignMatrix:
    """Stack of D_jl^+ matrices, shape (J, L, d^2, d^2), plus provenance."""

    basis: object  # OperatorBasis
    probes: ProbeSet
    povm: Povm
    dh: np.ndarray  # D_jl^+ (the Hermitian adjoints, used directly in p = Tr(dh chi))
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def entries(self) -> np.ndarray:
        """D_jl as defined (adjoint of the stored Hermitian stack)."""
        return dag(self.dh)

    @property
    def shape(self) -> tuple:
        return self.dh.shape[:2]

    @property
    def n_rows(self) -> int:
        return self.dh.shape[0] * self.dh.shape[1]

    def predict(self, chi_mat: np.ndarray) -> np.ndarray:
        """p_jl = Tr(D_jl^+ chi); real up to roundoff for Hermitian chi."""
        return np.einsum("jlmn,nm->jl", self.dh, np.asarray(chi_mat, complex))

    def rvec_rows(self) -> np.ndarray:
        """Real (J*L, d^4) matrix A with p = A @ rvec(chi)."""
        if "rvec_rows" not in self._cache:
            j, l, n, _ = self.dh.shape
            rows = np.array([herm_to_rvec(m) for m in self.dh.reshape(j * l, n, n)])
            self._cache["rvec_rows"] = rows
        return self._cache["rvec_rows"]


def design_matrices(probes: ProbeSet, povm: Povm, basis) -> DesignMatrix:
    if probes.dim != povm.dim or probes.dim != basis.dim:
        raise DimensionMismatchError("probes, POVM and basis act on different dimensions")
    els = basis.elements
    dh = np.einsum(
        "jab,mcb,lcd,nda->jlmn",
        probes.states, els.conj(), povm.effects, els, optimize=True,
    )
    return DesignMatrix(basis, probes, povm, dh)


def probabilities(p: ProcessMatrix, d: DesignMatrix) -> np.ndarray:
    if p.basis is not d.basis and p.basis.kind != d.basis.kind:
        raise InvalidArgumentError("process matrix and design matrix use different bases")
    if p.dim != d.probes.dim:
        raise DimensionMismatchError("dimension mismatch")
    raw = d.predict(p.mat)
    imag = np.abs(raw.imag).max()
    if imag > 1e-8:
        raise InconsistentInputsError(f"imaginary probability residual {imag:.3e}")
    return raw.real


@dataclass(frozen=True)
class MeasurementRecord:
    """Simulated frequencies f_jl = p_jl + sigma * W_jl (not clipped to [0,1])."""

    freqs: np.ndarray  # (J, L)
    sigma: float
    seed: object
    probe_kind: str = "custom"
    povm_kind: str = "custom"

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=float)
        if f.ndim != 2:
            raise InvalidArgumentError("frequencies must be a (probe, effect) table")
        if self.sigma < 0:
            raise InvalidArgumentError("sigma must be nonnegative")
        object.__setattr__(self, "freqs", f)

    @property
    def n_rows(self) -> int:
        return self.freqs.size

    def flat(self) -> np.ndarray:
        return self.freqs.reshape(-1)


def record_rng(seed) -> np.random.Generator:
    """Generator from an int seed or a list of ints (hierarchical sub-seeding)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (list, tuple)):
        return np.random.default_rng(np.random.SeedSequence(list(seed)))
    return np.random.default_rng(np.random.SeedSequence(seed))


def simulate_record(
    p_jl: np.ndarray,
    sigma: float,
    seed,
    probe_kind: str = "custom",
    povm_kind: str = "custom",
) -> MeasurementRecord:
    p_jl = np.asarray(p_jl, dtype=float)
    if sigma < 0:
        raise InvalidArgumentError("sigma must be nonnegative")
    if sigma == 0:
        f = p_jl.copy()
    else:
        f = p_jl + sigma * record_rng(seed).standard_normal(p_jl.shape)
    return MeasurementRecord(f, float(sigma), seed, probe_kind, povm_kind)


def record_to_csv(rec: MeasurementRecord, fh: io.TextIOBase) -> None:
    meta = {
        "sigma": repr(rec.sigma),
        "seed": rec.seed,
        "probe_kind": rec.probe_kind,
        "povm_kind": rec.povm_kind,
        "n_probes": rec.freqs.shape[0],
        "n_effects": rec.freqs.shape[1],
    }
    rows = (
        (j, l, float(rec.freqs[j, l]))
        for j in range(rec.freqs.shape[0])
        for l in range(rec.freqs.shape[1])
    )
    write_csv(fh, meta, ["probe_index", "effect_index", "frequency"], rows)


def record_from_csv(fh: io.TextIOBase) -> MeasurementRecord:
    meta, columns, rows = read_csv(fh)
    if columns != ["probe_index", "effect_index", "frequency"]:
        raise InvalidArgumentError(f"unexpected columns {columns}")
    nj, nl = int(meta["n_probes"]), int(meta["n_effects"])
    f = np.zeros((nj, nl))
    for j, l, v in rows:
        f[int(j), int(l)] = float(v)
    return MeasurementRecord(
        f,
        float(meta.get("sigma", "0")),
        meta.get("seed"),
        meta.get("probe_kind", "custom"),
        meta.get("povm_kind", "custom"),
    )


__all__ = [
    "DesignMatrix",
    "MeasurementRecord",
    "design_matrices",
    "probabilities",
    "simulate_record",
    "record_rng",
    "record_to_csv",
    "record_from_csv",
]
