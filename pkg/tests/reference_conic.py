"""Independent conic reference solutions (cvxpy) for estimator cross-checks.

Test-only: rebuilds each estimator as an explicit semidefinite program from
the design matrix, with no shared solver code beyond the problem data.
"""
import cvxpy as cp
import numpy as np

from uniqpt.maps import _tp_tensor


def _problem_data(design):
    n = design.basis.size
    d = design.basis.dim
    m = design.dh.reshape(-1, n * n)  # p_i = m_i . vec(X, order='F')
    k = _tp_tensor(design.basis)
    t = k.transpose(2, 3, 0, 1).reshape(d * d, n * n)
    return n, d, m, t


def solve_reference(design, freqs, kind, epsilon=None):
    """Return the optimal process matrix of the requested estimator."""
    n, d, m, t = _problem_data(design)
    f = np.asarray(freqs, float).reshape(-1)
    x = cp.Variable((n, n), hermitian=True)
    vx = cp.vec(x, order="F")
    pred = cp.real(m @ vx)
    tp_img = cp.reshape(t @ vx, (d, d), order="C")
    cons = [x >> 0]
    if kind == "LS":
        cons.append(tp_img == np.eye(d))
        obj = cp.Minimize(cp.sum_squares(pred - f))
    elif kind == "CS_L1":
        cons.append(tp_img == np.eye(d))
        cons.append(cp.norm(pred - f) <= np.sqrt(epsilon))
        obj = cp.Minimize(cp.norm1(vx))
    elif kind == "CS_TR":
        # trace equation excluded: only the traceless part of TP is enforced
        cons.append(tp_img - cp.trace(tp_img) / d * np.eye(d) == 0)
        cons.append(cp.norm(pred - f) <= np.sqrt(epsilon))
        obj = cp.Minimize(cp.real(cp.trace(x)))
    else:
        raise ValueError(kind)
    prob = cp.Problem(obj, cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"reference solve failed: {prob.status}")
    chi = np.asarray(x.value)
    return 0.5 * (chi + chi.conj().T)
