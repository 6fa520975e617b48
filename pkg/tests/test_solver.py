"""Unit and oracle tests for the ADMM estimators."""
import numpy as np
import pytest

from uniqpt._linalg import frob, herm_to_rvec, rvec_to_herm
from uniqpt.bases import (
    gellmann_basis,
    rotated_basis,
    traceless_identity_basis,
)
from uniqpt.channels import haar_unitary, process_fidelity, random_tp_cp_map
from uniqpt.errors import InfeasibleParametersError, InvalidArgumentError
from uniqpt.harness import FIG1_LS_RHO, convert_process
from uniqpt.maps import ProcessMatrix, kraus_to_process, spectral_form, tp_image, unitary_to_process
from uniqpt.measure import MeasurementRecord, design_matrices, probabilities, simulate_record
from uniqpt.probes import mub_povm, pure_state_povm, standard_probe_kets, uic_pure_zero_n
from uniqpt.solver import (
    EstimatorConfig,
    admm_solve,
    cptp_polish,
    default_epsilon,
    estimate_cs_l1,
    estimate_cs_tr,
    estimate_ls,
    project_tp_affine,
    tp_projector,
)

from reference_conic import solve_reference


def make_record(freqs, sigma=0.0):
    return MeasurementRecord(np.asarray(freqs), sigma, 0, "test", "test")


class TestDefaultEpsilon:
    def test_sigma_zero(self):
        assert default_epsilon(0.0, 100) == 0.0

    def test_reference_value(self):
        assert default_epsilon(1e-4, 150) == pytest.approx(
            1e-8 * (150 + 3 * np.sqrt(300)), rel=1e-12
        )

    def test_feasibility_rate(self):
        # at L = 150 rows the true map satisfies the data-fit bound for
        # >= 99% of simulated records
        d, sigma = 5, 1e-4
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 1), basis)
        p = probabilities(chi, design)
        eps = default_epsilon(sigma, p.size)
        hits = 0
        for seed in range(1000):
            f = simulate_record(p, sigma, [99, seed]).freqs
            if np.sum((f - p) ** 2) <= eps:
                hits += 1
        assert hits >= 990

    def test_invalid_args(self):
        with pytest.raises(InvalidArgumentError):
            default_epsilon(-1.0, 10)


class TestTpProjection:
    def test_tp_input_unchanged(self):
        b = gellmann_basis(3)
        chi = kraus_to_process(random_tp_cp_map(3, 4, 1), b).mat
        assert frob(project_tp_affine(chi, b) - chi) < 1e-10

    def test_projection_lands_on_tp(self):
        b = gellmann_basis(3)
        rng = np.random.default_rng(2)
        g = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
        h = (g + g.conj().T) / 2
        proj = project_tp_affine(h, b)
        assert frob(tp_image(ProcessMatrix(b, proj)) - np.eye(3)) < 1e-9

    def test_idempotent_and_self_adjoint(self):
        b = gellmann_basis(2)
        proj = tp_projector(b)
        rng = np.random.default_rng(3)
        x, y = rng.normal(size=(2, 16))
        px, py = proj(x), proj(y)
        assert np.allclose(proj(px), px, atol=1e-10)
        # self-adjointness of the linear part: <Px, y - Py> = 0 pattern
        zero = proj(np.zeros(16))
        assert abs((x - px) @ (py - zero)) < 1e-9

    def test_minimum_norm_tp_point_d2(self):
        # projecting chi = 0 must give the smallest TP point; cross-check the
        # normal equations built independently from the constraint rows
        b = gellmann_basis(2)
        proj = tp_projector(b)
        z = proj(np.zeros(16))
        t, target = proj.T, proj.t
        lam = np.linalg.lstsq(t @ t.T, target, rcond=None)[0]
        assert np.allclose(z, t.T @ lam, atol=1e-9)
        chi = rvec_to_herm(z, 4)
        assert frob(tp_image(ProcessMatrix(b, chi)) - np.eye(2)) < 1e-9


class TestCptpPolish:
    def test_invariants(self):
        b = gellmann_basis(3)
        rng = np.random.default_rng(4)
        g = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
        chi = cptp_polish((g + g.conj().T) / 2, b)
        assert np.linalg.eigvalsh(chi).min() >= -1e-6 * 3
        assert frob(tp_image(ProcessMatrix(b, chi)) - np.eye(3)) <= 2e-6


class TestLsEstimator:
    def test_exact_unitary_data_recovers_map(self):
        d = 3
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 5), basis)
        p = probabilities(chi, design)
        est = estimate_ls(make_record(p), design)
        assert est.data_fit < 1e-10
        assert process_fidelity(est.chi_hat, chi) > 1 - 1e-5

    def test_exact_unitary_data_pure_povm_small_rho(self):
        # d UIC probes with the pure-state POVM identify a unitary map; the
        # badly conditioned design needs the small fig1 penalty to converge
        d = 5
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), pure_state_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 5), basis)
        p = probabilities(chi, design)
        est = estimate_ls(make_record(p), design,
                          EstimatorConfig(rho=FIG1_LS_RHO, tol_rel=1e-8,
                                          max_iter=150_000))
        assert est.converged
        assert process_fidelity(est.chi_hat, chi) > 1 - 1e-4

    def test_exact_cptp_data_unique_with_full_probes(self):
        # 9 probes + MUB POVM determine an arbitrary CPTP map at d=3
        d = 3
        basis = gellmann_basis(d)
        design = design_matrices(standard_probe_kets(d), mub_povm(d), basis)
        chi = kraus_to_process(random_tp_cp_map(d, 5, 6), basis)
        est = estimate_ls(make_record(probabilities(chi, design)), design)
        assert process_fidelity(est.chi_hat, chi) > 1 - 1e-5

    def test_residual_monotone_after_burn_in(self):
        d = 2
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 7), basis)
        f = probabilities(chi, design).ravel()
        a = design.rvec_rows()
        fits = []
        state = None
        for _ in range(30):
            est = admm_solve(design, f, EstimatorConfig(max_iter=50), state)
            state = est.state
            fits.append(float(np.linalg.norm(a @ state["z"] - f) ** 2))
        burn = fits[5:]
        assert all(b <= a_ + 1e-12 for a_, b in zip(burn, burn[1:]))


class TestCsEstimators:
    def test_l1_exact_data_sparse_solution(self):
        d = 3
        u = haar_unitary(d, 8)
        basis = rotated_basis(u, gellmann_basis(d))
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(u, basis)
        est = estimate_cs_l1(make_record(probabilities(chi, design)), design)
        assert process_fidelity(est.chi_hat, chi) > 1 - 1e-5
        # the solution concentrates on the (0, 0) target entry
        assert est.chi_hat.mat[0, 0].real == pytest.approx(d, abs=1e-3)

    def test_l1_descent_below_tp_start(self):
        # with a huge epsilon the l1 solution beats the TP-projected start
        d = 2
        u = haar_unitary(d, 9)
        basis = rotated_basis(u, gellmann_basis(d))
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(u, basis)
        f = probabilities(chi, design)
        start = project_tp_affine(np.zeros((4, 4), complex), basis)
        est = estimate_cs_l1(
            make_record(f), design, EstimatorConfig(epsilon=10.0)
        )
        assert est.objective <= np.abs(start).sum() + 1e-6

    def test_l1_requires_rotated_basis(self):
        d = 2
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 10), basis)
        with pytest.raises(InvalidArgumentError):
            estimate_cs_l1(make_record(probabilities(chi, design)), design)

    def test_tr_exact_data_rank_one(self):
        d = 3
        basis = traceless_identity_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        u = haar_unitary(d, 11)
        chi = unitary_to_process(u, basis)
        est = estimate_cs_tr(make_record(probabilities(chi, design)), design)
        assert process_fidelity(
            convert_process(est.chi_hat, gellmann_basis(d)),
            unitary_to_process(u, gellmann_basis(d)),
        ) > 1 - 1e-5
        choi = convert_process(est.chi_hat, gellmann_basis(d))
        assert spectral_form(choi).rank(threshold=1e-3 * d) == 1

    def test_tr_requires_traceless_id_basis(self):
        d = 2
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 12), basis)
        with pytest.raises(InvalidArgumentError):
            estimate_cs_tr(make_record(probabilities(chi, design)), design)

    def test_infeasible_epsilon_raises(self):
        d = 2
        u = haar_unitary(d, 13)
        basis = rotated_basis(u, gellmann_basis(d))
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        f = np.full((2, 6), 0.9)  # rows sum to 5.4: no CPTP map comes close
        rec = MeasurementRecord(f, 1e-4, 0, "t", "t")
        with pytest.raises(InfeasibleParametersError):
            estimate_cs_l1(rec, design, EstimatorConfig(epsilon=1e-8, max_iter=500))


class TestWarmStart:
    def test_warm_start_reduces_iterations(self):
        d = 3
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 14), basis)
        rec = make_record(probabilities(chi, design))
        cold = estimate_ls(rec, design)
        warm = estimate_ls(rec, design, warm_state=cold.state)
        assert warm.iterations < cold.iterations

    def test_mismatched_state_rejected(self):
        d = 2
        basis = gellmann_basis(d)
        design = design_matrices(uic_pure_zero_n(d), mub_povm(d), basis)
        chi = unitary_to_process(haar_unitary(d, 15), basis)
        rec = make_record(probabilities(chi, design))
        bad = {"z": np.zeros(9), "us": [np.zeros(9)] * 2, "uy": np.zeros(4), "rho": 1.0}
        with pytest.raises(InvalidArgumentError):
            estimate_ls(rec, design, warm_state=bad)


def _oracle_instance(seed, kind):
    """A d=2 noisy-record instance; the full probe set makes the design
    matrix informationally complete so the optimum is unique."""
    d = 2
    sigma = 1e-4
    u = haar_unitary(d, [500, seed])
    if kind == "LS":
        basis = gellmann_basis(d)
    elif kind == "CS_L1":
        basis = rotated_basis(u, gellmann_basis(d))
    else:
        basis = traceless_identity_basis(d)
    design = design_matrices(standard_probe_kets(d), mub_povm(d), basis)
    chi = unitary_to_process(u, basis)
    rec = simulate_record(probabilities(chi, design), sigma, [501, seed])
    return design, rec, sigma


class TestConicOracle:
    """ADMM vs an independent conic reference, criterion 1e-4 in fidelity."""

    @pytest.mark.parametrize("kind", ["LS", "CS_L1", "CS_TR"])
    def test_agreement_on_ten_instances(self, kind):
        estimator = {
            "LS": estimate_ls, "CS_L1": estimate_cs_l1, "CS_TR": estimate_cs_tr
        }[kind]
        g = gellmann_basis(2)
        for seed in range(10):
            design, rec, sigma = _oracle_instance(seed, kind)
            eps = default_epsilon(sigma, rec.n_rows)
            cfg = EstimatorConfig(epsilon=eps if kind != "LS" else None)
            est = estimator(rec, design, cfg)
            ref_chi = solve_reference(
                design, rec.flat(), kind, epsilon=eps
            )
            if kind == "CS_TR":
                tr = ProcessMatrix(design.basis, ref_chi).map_trace()
                ref_chi = ref_chi * (2.0 / tr)
            ref_chi = cptp_polish(ref_chi, design.basis)
            f = process_fidelity(
                convert_process(est.chi_hat, g),
                convert_process(ProcessMatrix(design.basis, ref_chi), g),
            )
            assert f >= 1 - 1e-4, f"{kind} instance {seed}: fidelity {f}"
