"""Noise-free algebraic reconstruction of a unitary from UIC-probe data.

Three protocols: the two-state mixed protocol, the sequential d-state
protocol, and the minimal-outcome protocol built on truncated pure-state
POVMs.  All fix the global phase by making the first nonzero amplitude of
the image of |0> real positive.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import dag, frob
from .errors import (
    DegenerateSpectrumError,
    FailureSetError,
    InvalidArgumentError,
    NotUnitaryDataError,
)
from .probes import ket, truncated_povm, uic_pure_zero_n

DEFAULT_TOL = 1e-6
C00_FAILURE_THRESHOLD = 1e-6

PHASE_CONVENTION = "first-nonzero-of-u0-real-positive"


@dataclass(frozen=True)
class UnitaryEstimate:
    """Reconstructed unitary with its diagnostics."""

    u: np.ndarray
    method: str
    unitarity_residual: float
    phase_convention: str = PHASE_CONVENTION
    diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.u.shape[0]


def _fix_global_phase(u: np.ndarray) -> np.ndarray:
    col = u[:, 0]
    idx = np.argmax(np.abs(col) > 1e-12)
    pivot = col[idx]
    if abs(pivot) < 1e-12:
        return u
    return u * (abs(pivot) / pivot)


def _unitarity_residual(u: np.ndarray) -> float:
    return frob(dag(u) @ u - np.eye(u.shape[0]))


def _finish(u: np.ndarray, method: str, tol: float, diagnostics: dict) -> UnitaryEstimate:
    u = _fix_global_phase(u)
    resid = _unitarity_residual(u)
    if resid > tol:
        raise NotUnitaryDataError(f"reconstruction has unitarity residual {resid:.3e}")
    return UnitaryEstimate(u, method, resid, diagnostics=diagnostics)


def reconstruct_from_mixed_uic(
    rho0_out: np.ndarray,
    rho1_out: np.ndarray,
    lam: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> UnitaryEstimate:
    """Two-state protocol: diagonalize the first output to get the image
    basis up to phases, then read the phases off the second output through
    |u_n><u_n| rho1 |u_0| = |u_n>/d."""
    rho0_out = np.asarray(rho0_out, complex)
    rho1_out = np.asarray(rho1_out, complex)
    lam = np.asarray(lam, float)
    d = lam.size
    if rho0_out.shape != (d, d) or rho1_out.shape != (d, d):
        raise InvalidArgumentError("output states have the wrong shape")
    w, v = np.linalg.eigh(rho0_out)
    w, v = w[::-1], v[:, ::-1]  # match the descending input spectrum
    if np.min(-np.diff(w)) < tol:
        raise DegenerateSpectrumError(
            f"eigenvalue spacing {np.min(-np.diff(w)):.3e} below tolerance"
        )
    u0 = v[:, 0]
    cols = [u0]
    for n in range(1, d):
        c = np.vdot(v[:, n], rho1_out @ u0)
        if abs(c) < 1e-12:
            raise NotUnitaryDataError("vanishing phase-reference amplitude")
        cols.append(v[:, n] * (c / abs(c)))
    u = np.column_stack(cols)
    # data-consistency check surfaces non-unitary inputs (e.g. mixed maps)
    plus = np.full(d, 1 / np.sqrt(d), complex)
    resid = max(
        frob((u * lam) @ dag(u) - rho0_out),
        frob(np.outer(u @ plus, (u @ plus).conj()) - rho1_out),
    )
    if resid > tol:
        raise NotUnitaryDataError(f"outputs deviate from any unitary image by {resid:.3e}")
    return _finish(u, "mixed-uic", tol, {"data_residual": resid, "n_probes": 2})


def reconstruct_sequential(
    psi_outputs: list[np.ndarray] | np.ndarray,
    tol: float = DEFAULT_TOL,
) -> UnitaryEstimate:
    """Sequential protocol on outputs of the |0>, (|0>+|n>)/sqrt2 probes.

    u_0 is the principal eigenvector of the first output; each later output
    rho_n = |psi><psi| with |psi> = (u_0+u_n)/sqrt2 gives u_n = 2 rho_n u_0 - u_0.
    """
    outs = [np.asarray(m, complex) for m in psi_outputs]
    d = outs[0].shape[0]
    if len(outs) != d:
        raise InvalidArgumentError(f"expected {d} output states, got {len(outs)}")
    w, v = np.linalg.eigh(outs[0])
    if w[-2] > tol or abs(w[-1] - 1) > tol:
        raise NotUnitaryDataError("first output is not a rank-1 projector")
    u0 = v[:, -1]
    cols = [u0]
    for n in range(1, d):
        cols.append(2 * outs[n] @ u0 - u0)
    est = _finish(np.column_stack(cols), "sequential", tol, {"n_effects_budget": 2 * d * d})
    return est


def minimal_probability_tables(u: np.ndarray, a: float | None = None, b: float | None = None):
    """Exact outcome probabilities feeding reconstruct_minimal: probe k of the
    |0>, (|0>+|k>)/sqrt2 family measured with the step-k truncated POVM."""
    u = np.asarray(u, complex)
    d = u.shape[0]
    probes = uic_pure_zero_n(d)
    tables = []
    for k in range(d):
        pov = truncated_povm(d, k, a, b)
        rho = u @ probes.states[k] @ dag(u)
        tables.append(np.einsum("lab,ba->l", pov.effects, rho).real)
    return tables


def _parse_table(row: np.ndarray, d: int, k: int, a: float, b: float):
    """Split a truncated-POVM outcome row into (p0, pn, ptn)."""
    row = np.asarray(row, float)
    nkeep = d - 1 - k
    if row.size != 2 * (d - k):
        raise InvalidArgumentError(
            f"table {k} must have {2 * (d - k)} outcomes, got {row.size}"
        )
    return row[0], row[1 : 1 + nkeep], row[1 + nkeep : 1 + 2 * nkeep]


def reconstruct_minimal(
    tables,
    a: float | None = None,
    b: float | None = None,
    tol: float = DEFAULT_TOL,
) -> UnitaryEstimate:
    """Minimal-outcome protocol: row k measures 2(d-k) outcomes and fills its
    k missing amplitudes from 2k orthogonality relations.

    The phase of each partially measured output enters through a cosine
    equation with two roots, so several unitaries can reproduce the full
    outcome table exactly.  All feasible branches are searched; infeasible
    circle equations prune, the surviving unitary candidates are deduplicated,
    and the lexicographically smallest is returned with the candidate count in
    the diagnostics.
    """
    d = len(tables)
    if d < 2:
        raise InvalidArgumentError("need at least two probability tables")
    if a is None:
        a = 1 / (4 * d)
    if b is None:
        b = 1 / (4 * d)
    n_outcomes = sum(np.asarray(t).size for t in tables)
    if n_outcomes != d * d + d:
        raise InvalidArgumentError(
            f"expected {d * d + d} outcomes in total, got {n_outcomes}"
        )

    p00, pn, ptn = _parse_table(tables[0], d, 0, a, b)
    if p00 / a < C00_FAILURE_THRESHOLD:
        raise FailureSetError(f"p00/a = {p00 / a:.3e}: reference amplitude c00 ~ 0")
    c00 = np.sqrt(p00 / a)
    u0 = np.zeros(d, complex)
    u0[0] = c00
    # effect E_n reads off the real part; the skew effect gives b(1 - 2 c00 Im)
    u0[1:] = ((pn / b - 1) - 1j * (ptn / b - 1)) / (2 * c00)

    stack = [[u0]]
    candidates = []
    while stack:
        rows = stack.pop()
        k = len(rows)
        if k == d:
            candidates.append(np.column_stack(rows))
            continue
        p0, pk, ptk = _parse_table(tables[k], d, k, a, b)
        g0 = np.sqrt(max(p0 / a, 0.0))
        if g0 < 1e-12:
            continue  # measured reference amplitude vanished on this branch
        g = np.zeros(d, complex)
        g[0] = g0
        nkeep = d - 1 - k
        if nkeep > 0:
            g[1 : 1 + nkeep] = ((pk / b - 1) - 1j * (ptk / b - 1)) / (2 * g0)
        # unknown high components of the output, fixed by orthogonality:
        # <u_j|phi_k> = delta_j0 / sqrt2 with phi_k = (u_0 + u_k)/sqrt2
        miss = list(range(d - k, d))
        m = np.array([[rows[j][n].conj() for n in miss] for j in range(k)])
        rhs_a = np.array([(1.0 if j == 0 else 0.0) / np.sqrt(2) for j in range(k)])
        h = np.array([np.vdot(rows[j], g) for j in range(k)])
        w_a, _, rank, _ = np.linalg.lstsq(m, rhs_a, rcond=None)
        w_b = np.linalg.lstsq(m, -h, rcond=None)[0]
        if rank < k:
            continue
        if max(np.linalg.norm(m @ w_a - rhs_a), np.linalg.norm(m @ w_b + h)) > tol:
            continue
        # u_k = z*v1 + v0 with |z| = 1 fixed by the norm equation (a circle)
        v1 = np.sqrt(2) * g
        v0 = -rows[0].copy()
        v1[miss] += np.sqrt(2) * w_b
        v0[miss] += np.sqrt(2) * w_a
        c = np.vdot(v0, v1)
        t = 0.5 * (1 - np.vdot(v1, v1).real - np.vdot(v0, v0).real)
        if abs(c) < 1e-14:
            if abs(t) > tol:
                continue
            stack.append(rows + [v1 + v0])  # z free in exact degeneracy; take z=1
            continue
        ratio = t / abs(c)
        if abs(ratio) > 1 + 1e-7:
            continue  # branch cannot satisfy the norm equation
        ratio = np.clip(ratio, -1.0, 1.0)
        gamma = np.angle(c)
        roots = {np.arccos(ratio) - gamma, -np.arccos(ratio) - gamma}
        for alpha in roots:
            stack.append(rows + [np.exp(1j * alpha) * v1 + v0])

    uniq = []
    for cand in candidates:
        if _unitarity_residual(cand) > tol:
            continue
        if not any(frob(cand - x) < 1e-6 for x in uniq):
            uniq.append(cand)
    if not uniq:
        raise NotUnitaryDataError("no unitary is consistent with the outcome tables")
    uniq.sort(key=lambda x: tuple(np.round(np.concatenate([x.real, x.imag]), 9).ravel()))
    diagnostics = {
        "n_outcomes": n_outcomes,
        "n_candidates": len(uniq),
        "ambiguous": len(uniq) > 1,
        "candidates": [_fix_global_phase(x) for x in uniq],
    }
    return _finish(uniq[0], "minimal", tol, diagnostics)


__all__ = [
    "UnitaryEstimate",
    "PHASE_CONVENTION",
    "C00_FAILURE_THRESHOLD",
    "reconstruct_from_mixed_uic",
    "reconstruct_sequential",
    "reconstruct_minimal",
    "minimal_probability_tables",
]
