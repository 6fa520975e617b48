"""Random map generation, error channels, and the process-fidelity metric."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import dag, frob, hermitize, psd_sqrt
from .errors import InvalidArgumentError, UnreachableBandError
from .maps import (
    ChoiMatrix,
    KrausSet,
    ProcessMatrix,
    choi_to_kraus,
    kraus_to_process,
    unitary_to_process,
)
from .measure import record_rng

KIND_COHERENT = "coherent"
KIND_INCOHERENT = "incoherent"


@dataclass(frozen=True)
class ErrorSpec:
    """Calibrated error model attached to a target unitary."""

    kind: str
    u_target: np.ndarray
    eta: float = 0.0
    h: np.ndarray | None = None  # Hermitian generator, Tr(h) = 1
    xi: float = 0.0
    kraus: KrausSet | None = None
    achieved_fidelity: float = float("nan")

    def applied_process(self, basis) -> ProcessMatrix:
        if self.kind == KIND_COHERENT:
            return coherent_applied_map(self.u_target, self.eta, self.h, basis)[1]
        return incoherent_applied_map(self.u_target, self.xi, self.kraus, basis)


def haar_unitary(d: int, seed) -> np.ndarray:
    """QR of a Ginibre matrix with the R-diagonal phase fix."""
    rng = record_rng(seed)
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    ph = r.diagonal().copy()
    ph /= np.abs(ph)
    return q * ph


def random_hermitian_unit_trace(d: int, seed) -> np.ndarray:
    """H = (G + G^+)/2 rescaled to Tr(H) = 1; resamples near-traceless draws."""
    rng = record_rng(seed)
    while True:
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = hermitize(g)
        tr = np.trace(h).real
        if abs(tr) > 1e-6:
            return h / tr


def coherent_unitary(eta: float, h: np.ndarray) -> np.ndarray:
    """e^{i eta H} through the eigendecomposition of H."""
    w, v = np.linalg.eigh(np.asarray(h, complex))
    return (v * np.exp(1j * eta * w)) @ dag(v)


def coherent_applied_map(u_t, eta: float, h, basis) -> tuple[np.ndarray, ProcessMatrix]:
    if eta < 0:
        raise InvalidArgumentError("eta must be nonnegative")
    u_a = coherent_unitary(eta, h) @ np.asarray(u_t, complex)
    return u_a, unitary_to_process(u_a, basis)


def incoherent_applied_map(u_t, xi: float, kraus: KrausSet, basis) -> ProcessMatrix:
    """(1 - xi) * target map + xi * (error channel after the target)."""
    if not 0 <= xi <= 1:
        raise InvalidArgumentError("xi must lie in [0, 1]")
    if kraus.tp_residual() > 1e-8:
        raise InvalidArgumentError("error channel is not trace preserving")
    u_t = np.asarray(u_t, complex)
    chi_t = unitary_to_process(u_t, basis)
    composed = KrausSet(kraus.ops @ u_t)
    chi_e = kraus_to_process(composed, basis)
    return ProcessMatrix(basis, (1 - xi) * chi_t.mat + xi * chi_e.mat)


def random_tp_cp_map(d: int, n_kraus: int, seed) -> KrausSet:
    """TP CP map from the Ginibre-Choi ensemble at chosen Kraus rank."""
    if not 1 <= n_kraus <= d * d:
        raise InvalidArgumentError(f"n_kraus must be in [1, {d * d}]")
    rng = record_rng(seed)
    g = rng.standard_normal((d * d, n_kraus)) + 1j * rng.standard_normal((d * d, n_kraus))
    w = g @ dag(g)
    marg = np.einsum("xnxm->nm", w.reshape(d, d, d, d))
    inv_sqrt = np.linalg.inv(psd_sqrt(marg))
    s = np.kron(np.eye(d), inv_sqrt)  # input factor sits on the low-order index
    choi = ChoiMatrix(d, s @ w @ dag(s))
    return choi_to_kraus(choi, rank_tol=1e-12)


def process_fidelity(chi_hat: ProcessMatrix, chi_ref: ProcessMatrix, tol: float = 1e-6) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(ref) hat sqrt(ref)))^2 / d^2."""
    if chi_hat.dim != chi_ref.dim:
        raise InvalidArgumentError("dimension mismatch")
    d = chi_hat.dim
    for m in (chi_hat.mat, chi_ref.mat):
        w = np.linalg.eigvalsh(m)
        if w.min() < -tol * d:
            raise InvalidArgumentError(f"matrix has eigenvalue {w.min():.3e}; not PSD")
    r = psd_sqrt(chi_ref.mat, clip_tol=0.0)
    inner = psd_sqrt(r @ chi_hat.mat @ r, clip_tol=0.0)
    f = (np.trace(inner).real / d) ** 2
    return float(min(max(f, 0.0), 1.0))


def unitary_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    d = u.shape[0]
    return float(abs(np.trace(dag(u) @ v)) ** 2 / d**2)


def coherent_fidelity(eta: float, h: np.ndarray) -> float:
    """|Tr e^{i eta H}|^2 / d^2 as a cheap function of eta."""
    w = np.linalg.eigvalsh(np.asarray(h, complex))
    d = w.size
    return float(abs(np.exp(1j * eta * w).sum()) ** 2 / d**2)


def calibrate_to_fidelity_band(
    kind: str,
    u_t: np.ndarray,
    target_f: float,
    width: float,
    seed,
    n_kraus: int | None = None,
    max_retries: int = 50,
) -> ErrorSpec:
    """Sample an error model whose target-vs-applied fidelity lands in
    [target_f - width, target_f + width]."""
    if not 0 < target_f <= 1 or width <= 0:
        raise InvalidArgumentError("need target_f in (0, 1] and width > 0")
    d = np.asarray(u_t).shape[0]
    if kind == KIND_COHERENT:
        if target_f == 1.0:
            h = random_hermitian_unit_trace(d, [*_seed_list(seed), 0])
            return ErrorSpec(kind, u_t, eta=0.0, h=h, achieved_fidelity=1.0)
        for attempt in range(max_retries):
            h = random_hermitian_unit_trace(d, [*_seed_list(seed), attempt])
            eta = _bisect_eta(h, target_f)
            if eta is None:
                continue
            f = coherent_fidelity(eta, h)
            if abs(f - target_f) <= width:
                return ErrorSpec(kind, u_t, eta=eta, h=h, achieved_fidelity=f)
        raise UnreachableBandError(f"no coherent model reached F = {target_f} +/- {width}")
    if kind == KIND_INCOHERENT:
        if n_kraus is None:
            n_kraus = d * d
        from .bases import gellmann_basis

        basis = gellmann_basis(d)
        chi_t = unitary_to_process(u_t, basis)
        for attempt in range(max_retries):
            kraus = random_tp_cp_map(d, n_kraus, [*_seed_list(seed), attempt])
            chi_full = incoherent_applied_map(u_t, 1.0, kraus, basis)
            f_err = process_fidelity(chi_full, chi_t)
            if f_err >= target_f:
                continue  # xi would have to exceed 1
            xi = (1 - target_f) / (1 - f_err)
            if not 0 <= xi <= 1:
                continue
            chi_a = incoherent_applied_map(u_t, xi, kraus, basis)
            f = process_fidelity(chi_a, chi_t)
            if abs(f - target_f) <= width:
                return ErrorSpec(kind, u_t, xi=xi, kraus=kraus, achieved_fidelity=f)
        raise UnreachableBandError(f"no incoherent model reached F = {target_f} +/- {width}")
    raise InvalidArgumentError(f"unknown error kind {kind!r}")


def _seed_list(seed) -> list:
    return list(seed) if isinstance(seed, (list, tuple)) else [seed]


def _bisect_eta(h: np.ndarray, target_f: float, eta_max: float = 20.0) -> float | None:
    """First crossing of |Tr e^{i eta H}|^2/d^2 below target_f, refined by
    bisection.  None if no crossing occurs before eta_max."""
    step = 0.05
    lo, f_lo = 0.0, 1.0
    eta = step
    while eta <= eta_max:
        f = coherent_fidelity(eta, h)
        if f < target_f:
            hi = eta
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if coherent_fidelity(mid, h) < target_f:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        lo, f_lo = eta, f
        eta += step
    return None


__all__ = [
    "ErrorSpec",
    "KIND_COHERENT",
    "KIND_INCOHERENT",
    "haar_unitary",
    "random_hermitian_unit_trace",
    "coherent_unitary",
    "coherent_applied_map",
    "incoherent_applied_map",
    "random_tp_cp_map",
    "process_fidelity",
    "unitary_fidelity",
    "coherent_fidelity",
    "calibrate_to_fidelity_band",
]
