"""Constrained convex estimators (LS, CS_l1, CS_Tr) on a consensus-ADMM engine.

The optimization variable is the real rvec parameterization of the Hermitian
process matrix.  Constraint blocks (PSD cone, TP affine set) and the data-fit
block y = A z each get a proximal step; the consensus update solves
(m I + A^T A) z = rhs with a cached, penalty-independent inverse.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._linalg import (
    AffineProjector,
    herm_to_rvec,
    project_psd,
    rvec_to_herm,
    _triu_indices,
)
from .bases import KIND_ROTATED, KIND_TRACELESS_ID
from .errors import InconsistentBasisError, InfeasibleParametersError, InvalidArgumentError
from .maps import ProcessMatrix
from .measure import DesignMatrix, MeasurementRecord

KIND_LS = "LS"
KIND_CS_L1 = "CS_L1"
KIND_CS_TR = "CS_TR"

# empirically tuned penalty parameters per splitting geometry
DEFAULT_RHO = {KIND_LS: 0.02, KIND_CS_L1: 50.0, KIND_CS_TR: 50.0}


@dataclass(frozen=True)
class EstimatorConfig:
    kind: str = KIND_LS
    epsilon: float | None = None  # data-fit threshold, CS modes only
    tol_primal: float | None = None  # absolute floor, defaults to 1e-7 * d^2
    tol_dual: float | None = None
    tol_rel: float = 1e-6  # relative stopping term (0 for purely absolute)
    max_iter: int = 50_000
    rho: float | None = None  # default chosen per estimator kind
    rho_min: float = 1e-3
    rho_max: float = 1e3
    adapt_every: int = 0  # 0 disables residual-balancing adaptation
    alpha: float = 1.6  # over-relaxation parameter, in (0, 2)

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon < 0:
            raise InvalidArgumentError("epsilon must be nonnegative")
        if not 0 < self.alpha < 2:
            raise InvalidArgumentError("alpha must lie in (0, 2)")
        for t in (self.tol_primal, self.tol_dual):
            if t is not None and t <= 0:
                raise InvalidArgumentError("tolerances must be positive")


@dataclass(frozen=True)
class Estimate:
    chi_hat: ProcessMatrix
    objective: float
    data_fit: float  # sum of squared frequency residuals at chi_hat
    iterations: int
    converged: bool
    state: dict = field(default_factory=dict, repr=False, compare=False)


def default_epsilon(sigma: float, n_rows: int) -> float:
    """Mean of the chi-squared data-fit residual plus three standard
    deviations: sigma^2 (L + 3 sqrt(2L))."""
    if sigma < 0 or n_rows < 1:
        raise InvalidArgumentError("need sigma >= 0 and at least one record row")
    return sigma**2 * (n_rows + 3 * np.sqrt(2 * n_rows))


def _build_tp_projector(basis, include_trace_equation: bool) -> AffineProjector:
    n = basis.size
    d = basis.dim
    # columns of the linear map rvec(chi) -> rvec(tp_image(chi))
    from .maps import _tp_tensor

    k = _tp_tensor(basis)  # (n, n, d, d) with K[m, n] = Y_m^+ Y_n
    t_rows = np.empty((d * d, n * n))
    for i in range(n * n):
        e = np.zeros(n * n)
        e[i] = 1.0
        chi = rvec_to_herm(e, n)
        img = np.einsum("nm,mnac->ac", chi, k)
        t_rows[:, i] = herm_to_rvec(img)
    if include_trace_equation:
        target = herm_to_rvec(np.eye(d))
    else:
        # keep only the traceless part of the TP equations (= 0)
        diag_mean = t_rows[:d].mean(axis=0)
        t_rows = t_rows.copy()
        t_rows[:d] -= diag_mean
        target = np.zeros(d * d)
    proj = AffineProjector(t_rows, target)
    if proj.rank == 0:
        raise InconsistentBasisError("TP constraint system is singular")
    return proj


def tp_projector(basis, include_trace_equation: bool = True) -> AffineProjector:
    key = ("tp_proj", include_trace_equation)
    if key not in basis._cache:
        basis._cache[key] = _build_tp_projector(basis, include_trace_equation)
    return basis._cache[key]


def project_tp_affine(chi: np.ndarray, basis, include_trace_equation: bool = True) -> np.ndarray:
    """Euclidean projection of a Hermitian matrix onto the (possibly
    trace-excluded) TP affine subspace."""
    n = basis.size
    return rvec_to_herm(tp_projector(basis, include_trace_equation)(herm_to_rvec(chi)), n)


def _psd_prox(n):
    def prox(v, rho):
        return herm_to_rvec(project_psd(rvec_to_herm(v, n)))

    return prox


def _l1_groups(n):
    """rvec index layout: [n diag | k re | k im] with k = n(n-1)/2."""
    iu, _ = _triu_indices(n)
    k = iu.size
    return np.arange(n), np.arange(n, n + k), np.arange(n + k, n + 2 * k)


def _l1_prox(n):
    di, ri, ii = _l1_groups(n)

    def prox(v, rho):
        out = v.copy()
        kappa = 1.0 / rho
        out[di] = np.sign(v[di]) * np.maximum(np.abs(v[di]) - kappa, 0.0)
        norms = np.hypot(v[ri], v[ii])
        # pair (re, im) carries both chi_nm and chi_mn: group weight sqrt(2)
        scale = np.maximum(1.0 - np.sqrt(2.0) * kappa / np.maximum(norms, 1e-300), 0.0)
        out[ri] = v[ri] * scale
        out[ii] = v[ii] * scale
        return out

    return prox


def _trace_prox(n):
    di, _, _ = _l1_groups(n)

    def prox(v, rho):
        out = v.copy()
        out[di] -= 1.0 / rho
        return out

    return prox


def _l1_value(z, n):
    di, ri, ii = _l1_groups(n)
    return float(np.abs(z[di]).sum() + np.sqrt(2.0) * np.hypot(z[ri], z[ii]).sum())


def _cached_inverse(design: DesignMatrix, n_blocks: int):
    """Inverse of the consensus normal matrix n_blocks*I + A^T A.  Its
    eigenvalues are bounded below by n_blocks, so the explicit inverse is
    well conditioned and a single matvec per iteration beats a pair of
    triangular solves."""
    key = ("inv", n_blocks)
    if key not in design._cache:
        a = design.rvec_rows()
        m = n_blocks * np.eye(a.shape[1]) + a.T @ a
        c = cho_factor(m)
        design._cache[key] = cho_solve(c, np.eye(a.shape[1]))
    return design._cache[key]


def admm_solve(
    design: DesignMatrix,
    freqs: np.ndarray,
    cfg: EstimatorConfig,
    warm_state: dict | None = None,
) -> Estimate:
    """Run the splitting scheme selected by cfg.kind and return the raw
    (pre-polish) solution with its final internal state for warm starts."""
    basis = design.basis
    n = basis.size
    nv = n * n
    a = design.rvec_rows()
    f = np.asarray(freqs, float).reshape(-1)
    if f.size != a.shape[0]:
        raise InvalidArgumentError("record length does not match the design matrix")

    include_trace = cfg.kind != KIND_CS_TR
    proj_tp = tp_projector(basis, include_trace)
    proxes = [_psd_prox(n), lambda v, rho: proj_tp(v)]
    if cfg.kind == KIND_CS_L1:
        proxes.append(_l1_prox(n))
    elif cfg.kind == KIND_CS_TR:
        proxes.append(_trace_prox(n))
    elif cfg.kind != KIND_LS:
        raise InvalidArgumentError(f"unknown estimator kind {cfg.kind!r}")
    m_blocks = len(proxes)

    if cfg.kind == KIND_LS:
        def y_prox(v, rho):
            return (2.0 * f + rho * v) / (2.0 + rho)
    else:
        eps = cfg.epsilon
        if eps is None:
            raise InvalidArgumentError("CS estimators require epsilon")
        radius = np.sqrt(eps)

        def y_prox(v, rho):
            r = v - f
            nr = np.linalg.norm(r)
            if nr <= radius:
                return v
            return f + r * (radius / max(nr, 1e-300))

    pinv = _cached_inverse(design, m_blocks)
    tol_p_abs = cfg.tol_primal if cfg.tol_primal is not None else 1e-7 * n
    tol_d_abs = cfg.tol_dual if cfg.tol_dual is not None else 1e-7 * n

    if warm_state:
        z = warm_state["z"].copy()
        us = [u.copy() for u in warm_state["us"]]
        uy = warm_state["uy"].copy()
        rho = warm_state["rho"]
        if len(us) != m_blocks or z.size != nv:
            raise InvalidArgumentError("warm-start state does not match this problem")
    else:
        z = proj_tp(np.zeros(nv))  # minimum-norm TP point
        us = [np.zeros(nv) for _ in range(m_blocks)]
        uy = np.zeros(f.size)
        rho = cfg.rho if cfg.rho is not None else DEFAULT_RHO[cfg.kind]

    converged = False
    alpha = cfg.alpha
    it = 0
    for it in range(1, cfg.max_iter + 1):
        xs = [prox(z - u, rho) for prox, u in zip(proxes, us)]
        az = a @ z
        y = y_prox(az - uy, rho)
        # over-relaxation: mix the previous consensus point into the updates
        xhs = [alpha * x + (1.0 - alpha) * z for x in xs]
        yh = alpha * y + (1.0 - alpha) * az
        rhs = np.sum([xh + u for xh, u in zip(xhs, us)], axis=0) + a.T @ (yh + uy)
        z_new = pinv @ rhs
        az_new = a @ z_new
        for u, xh in zip(us, xhs):
            u += xh - z_new
        uy += yh - az_new
        r_pri = np.sqrt(
            sum(float(np.linalg.norm(x - z_new) ** 2) for x in xs)
            + float(np.linalg.norm(y - az_new) ** 2)
        )
        dz = z_new - z
        r_dual = rho * np.sqrt(
            m_blocks * float(np.linalg.norm(dz) ** 2) + float(np.linalg.norm(az_new - az) ** 2)
        )
        z = z_new
        zn = float(np.linalg.norm(z))
        xn = np.sqrt(sum(float(np.linalg.norm(x) ** 2) for x in xs)
                     + float(np.linalg.norm(y) ** 2))
        un = rho * np.sqrt(sum(float(np.linalg.norm(u) ** 2) for u in us)
                           + float(np.linalg.norm(uy) ** 2))
        tol_p = tol_p_abs + cfg.tol_rel * max(np.sqrt(m_blocks + 1.0) * zn, xn)
        tol_d = tol_d_abs + cfg.tol_rel * un
        if r_pri < tol_p and r_dual < tol_d:
            converged = True
            break
        if cfg.adapt_every and it % cfg.adapt_every == 0:
            # residual balancing; duals are scaled, so rescale them
            if r_pri > 10 * r_dual and rho * 2 <= cfg.rho_max:
                rho *= 2
                for u in us:
                    u /= 2
                uy /= 2
            elif r_dual > 10 * r_pri and rho / 2 >= cfg.rho_min:
                rho /= 2
                for u in us:
                    u *= 2
                uy *= 2

    chi = rvec_to_herm(z, n)
    data_fit = float(np.linalg.norm(a @ z - f) ** 2)
    if cfg.kind == KIND_LS:
        objective = data_fit
    elif cfg.kind == KIND_CS_L1:
        objective = _l1_value(z, n)
    else:
        objective = float(np.sum(z[:n]))
    return Estimate(
        ProcessMatrix(basis, chi),
        objective,
        data_fit,
        it,
        converged,
        state={"z": z, "us": us, "uy": uy, "rho": rho},
    )


def cptp_polish(chi: np.ndarray, basis, max_rounds: int = 1000) -> np.ndarray:
    """Alternating TP/PSD projections until min-eig >= -1e-6 d and the TP
    residual is <= 1e-6; guarantees the output invariants regardless of how
    the solver terminated."""
    d = basis.dim
    proj = tp_projector(basis, True)
    n = basis.size
    for _ in range(max_rounds):
        chi = rvec_to_herm(proj(herm_to_rvec(chi)), n)
        chi = project_psd(chi)
        min_eig = float(np.linalg.eigvalsh(chi).min())
        resid = float(np.linalg.norm(proj.T @ herm_to_rvec(chi) - proj.t))
        if min_eig >= -1e-6 * d and resid <= 1e-6:
            break
    return chi


def _finalize(
    raw: Estimate, design: DesignMatrix, freqs: np.ndarray, renorm_trace: float | None
) -> Estimate:
    basis = design.basis
    chi = raw.chi_hat.mat
    if renorm_trace is not None:
        tr = raw.chi_hat.map_trace()
        if abs(tr) > 1e-12:
            chi = chi * (renorm_trace / tr)
    chi = cptp_polish(chi, basis)
    p = ProcessMatrix(basis, chi)
    resid = design.rvec_rows() @ herm_to_rvec(chi) - np.asarray(freqs, float).reshape(-1)
    return replace(raw, chi_hat=p, data_fit=float(np.linalg.norm(resid) ** 2))


def estimate_ls(
    rec: MeasurementRecord,
    design: DesignMatrix,
    cfg: EstimatorConfig | None = None,
    warm_state: dict | None = None,
) -> Estimate:
    """Least-squares CPTP fit; no structural prior on the process matrix."""
    cfg = replace(cfg or EstimatorConfig(), kind=KIND_LS)
    raw = admm_solve(design, rec.flat(), cfg, warm_state)
    return _finalize(raw, design, rec.flat(), None)


def _resolve_epsilon(cfg: EstimatorConfig, rec: MeasurementRecord) -> EstimatorConfig:
    if cfg.epsilon is None:
        cfg = replace(cfg, epsilon=default_epsilon(rec.sigma, rec.n_rows))
    return cfg


def _check_feasible(est: Estimate, eps: float) -> Estimate:
    if not est.converged and est.data_fit > 2 * eps + 1e-8:
        raise InfeasibleParametersError(
            f"no CPTP point found within epsilon: residual {est.data_fit:.3e} > {eps:.3e}"
        )
    return est


def estimate_cs_l1(
    rec: MeasurementRecord,
    design: DesignMatrix,
    cfg: EstimatorConfig | None = None,
    warm_state: dict | None = None,
) -> Estimate:
    """Entrywise l1 minimization in a rotated basis singling out the target."""
    if design.basis.kind != KIND_ROTATED:
        raise InvalidArgumentError("CS_L1 requires a design matrix in a rotated basis")
    cfg = _resolve_epsilon(replace(cfg or EstimatorConfig(), kind=KIND_CS_L1), rec)
    raw = admm_solve(design, rec.flat(), cfg, warm_state)
    return _check_feasible(_finalize(raw, design, rec.flat(), None), cfg.epsilon)


def estimate_cs_tr(
    rec: MeasurementRecord,
    design: DesignMatrix,
    cfg: EstimatorConfig | None = None,
    warm_state: dict | None = None,
) -> Estimate:
    """Trace minimization in the traceless-with-identity basis, with the
    trace equation dropped from the TP constraints and the result rescaled to
    map trace d before the CPTP polish."""
    if design.basis.kind != KIND_TRACELESS_ID:
        raise InvalidArgumentError("CS_TR requires the traceless-with-identity basis")
    cfg = _resolve_epsilon(replace(cfg or EstimatorConfig(), kind=KIND_CS_TR), rec)
    raw = admm_solve(design, rec.flat(), cfg, warm_state)
    return _check_feasible(
        _finalize(raw, design, rec.flat(), float(design.basis.dim)), cfg.epsilon
    )


__all__ = [
    "EstimatorConfig",
    "Estimate",
    "KIND_LS",
    "KIND_CS_L1",
    "KIND_CS_TR",
    "default_epsilon",
    "project_psd",
    "project_tp_affine",
    "tp_projector",
    "admm_solve",
    "cptp_polish",
    "estimate_ls",
    "estimate_cs_l1",
    "estimate_cs_tr",
]
