"""Unit tests for random map generation, error models, and fidelities."""
import numpy as np
import pytest
from scipy import stats

from uniqpt._linalg import dag, frob
from uniqpt.bases import gellmann_basis
from uniqpt.channels import (
    calibrate_to_fidelity_band,
    coherent_applied_map,
    coherent_fidelity,
    coherent_unitary,
    haar_unitary,
    incoherent_applied_map,
    process_fidelity,
    random_hermitian_unit_trace,
    random_tp_cp_map,
    unitary_fidelity,
)
from uniqpt.errors import InvalidArgumentError, UnreachableBandError
from uniqpt.maps import (
    KrausSet,
    kraus_to_choi,
    kraus_to_process,
    spectral_form,
    unitary_to_process,
)


class TestHaarUnitary:
    def test_unitarity(self):
        u = haar_unitary(5, 0)
        assert frob(dag(u) @ u - np.eye(5)) < 1e-12

    def test_deterministic(self):
        assert np.array_equal(haar_unitary(4, 3), haar_unitary(4, 3))
        assert not np.array_equal(haar_unitary(4, 3), haar_unitary(4, 4))

    def test_eigenangle_distribution(self):
        # Haar measure makes eigenvalue angles uniform on the circle
        angles = []
        for seed in range(2000):
            w = np.linalg.eigvals(haar_unitary(5, [9000, seed]))
            angles.extend(np.angle(w))
        angles = (np.asarray(angles) + np.pi) / (2 * np.pi)
        assert stats.kstest(angles, "uniform").pvalue > 0.01


class TestRandomHermitian:
    def test_unit_trace_and_hermitian(self):
        h = random_hermitian_unit_trace(5, 1)
        assert np.trace(h).real == pytest.approx(1.0, abs=1e-12)
        assert frob(h - dag(h)) < 1e-12

    def test_off_diagonal_symmetric_about_zero(self):
        # the trace normalization is heavy-tailed, so test the median, which
        # is zero by the sign symmetry of the off-diagonal Ginibre entries
        vals = [
            random_hermitian_unit_trace(3, [800, seed])[0, 1].real
            for seed in range(2000)
        ]
        assert abs(np.median(vals)) < 0.1


class TestCoherentError:
    def test_eta_zero_is_target(self):
        d = 4
        u_t = haar_unitary(d, 2)
        h = random_hermitian_unit_trace(d, 3)
        basis = gellmann_basis(d)
        u_a, chi_a = coherent_applied_map(u_t, 0.0, h, basis)
        assert frob(u_a - u_t) < 1e-12
        assert process_fidelity(chi_a, unitary_to_process(u_t, basis)) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_fidelity_matches_character_formula(self):
        d = 5
        u_t = haar_unitary(d, 4)
        h = random_hermitian_unit_trace(d, 5)
        basis = gellmann_basis(d)
        for eta in (0.1, 0.5, 1.3):
            _, chi_a = coherent_applied_map(u_t, eta, h, basis)
            f = process_fidelity(chi_a, unitary_to_process(u_t, basis))
            assert f == pytest.approx(coherent_fidelity(eta, h), abs=1e-6)

    def test_exponential_is_unitary(self):
        h = random_hermitian_unit_trace(4, 6)
        u = coherent_unitary(0.7, h)
        assert frob(dag(u) @ u - np.eye(4)) < 1e-12

    def test_negative_eta_rejected(self):
        with pytest.raises(InvalidArgumentError):
            coherent_applied_map(np.eye(2), -0.1, np.eye(2) / 2, gellmann_basis(2))


class TestIncoherentError:
    def test_xi_zero_is_target(self):
        d = 3
        u_t = haar_unitary(d, 7)
        kraus = random_tp_cp_map(d, d * d, 8)
        basis = gellmann_basis(d)
        chi_a = incoherent_applied_map(u_t, 0.0, kraus, basis)
        assert frob(chi_a.mat - unitary_to_process(u_t, basis).mat) < 1e-12

    def test_xi_one_identity_error_is_target(self):
        d = 3
        u_t = haar_unitary(d, 9)
        basis = gellmann_basis(d)
        chi_a = incoherent_applied_map(u_t, 1.0, KrausSet(np.eye(d)), basis)
        assert frob(chi_a.mat - unitary_to_process(u_t, basis).mat) < 1e-10

    def test_fidelity_affine_in_xi(self):
        d = 4
        u_t = haar_unitary(d, 10)
        kraus = random_tp_cp_map(d, d * d, 11)
        basis = gellmann_basis(d)
        chi_t = unitary_to_process(u_t, basis)
        f_err = process_fidelity(incoherent_applied_map(u_t, 1.0, kraus, basis), chi_t)
        for xi in (0.2, 0.5, 0.8):
            f = process_fidelity(incoherent_applied_map(u_t, xi, kraus, basis), chi_t)
            assert f == pytest.approx((1 - xi) + xi * f_err, abs=1e-6)

    def test_out_of_range_xi_rejected(self):
        with pytest.raises(InvalidArgumentError):
            incoherent_applied_map(np.eye(2), 1.5, KrausSet(np.eye(2)), gellmann_basis(2))


class TestRandomTpCpMap:
    @pytest.mark.parametrize("d,rank", [(2, 3), (3, 9), (5, 25)])
    def test_trace_preserving(self, d, rank):
        k = random_tp_cp_map(d, rank, d * 10 + rank)
        assert k.tp_residual() < 1e-10

    def test_choi_rank_matches(self):
        k = random_tp_cp_map(3, 6, 12)
        assert spectral_form(kraus_to_choi(k)).rank() == 6

    def test_full_rank_maps_are_strongly_mixing(self):
        d = 5
        purities = []
        for seed in range(10):
            k = random_tp_cp_map(d, d * d, [13, seed])
            chi = kraus_to_choi(k).mat
            purities.append(np.trace(chi @ chi).real / d**2)
        # unitary maps have purity 1; the Ginibre-Choi ensemble is far from it
        assert np.mean(purities) < 0.3

    def test_bad_rank_rejected(self):
        with pytest.raises(InvalidArgumentError):
            random_tp_cp_map(3, 10, 0)


class TestProcessFidelity:
    def test_self_fidelity_one(self):
        chi = kraus_to_process(random_tp_cp_map(3, 4, 20), gellmann_basis(3))
        assert process_fidelity(chi, chi) == pytest.approx(1.0, abs=1e-10)

    def test_matches_unitary_overlap(self):
        d = 4
        u, v = haar_unitary(d, 21), haar_unitary(d, 22)
        b = gellmann_basis(d)
        f_uhlmann = process_fidelity(unitary_to_process(u, b), unitary_to_process(v, b))
        assert f_uhlmann == pytest.approx(unitary_fidelity(u, v), abs=1e-6)

    def test_symmetric(self):
        b = gellmann_basis(3)
        c1 = kraus_to_process(random_tp_cp_map(3, 2, 23), b)
        c2 = kraus_to_process(random_tp_cp_map(3, 5, 24), b)
        assert process_fidelity(c1, c2) == pytest.approx(
            process_fidelity(c2, c1), abs=1e-6
        )

    def test_non_psd_rejected(self):
        from uniqpt.maps import ProcessMatrix

        b = gellmann_basis(2)
        good = unitary_to_process(np.eye(2), b)
        bad = ProcessMatrix(b, good.mat - np.diag([0, 0, 0, 0.1]))
        with pytest.raises(InvalidArgumentError):
            process_fidelity(bad, good)


class TestCalibration:
    def test_coherent_band(self):
        d = 5
        u_t = haar_unitary(d, 30)
        spec = calibrate_to_fidelity_band("coherent", u_t, 0.9, 0.005, [31])
        assert abs(spec.achieved_fidelity - 0.9) <= 0.005
        basis = gellmann_basis(d)
        f = process_fidelity(spec.applied_process(basis), unitary_to_process(u_t, basis))
        assert f == pytest.approx(spec.achieved_fidelity, abs=1e-6)

    def test_coherent_target_one(self):
        spec = calibrate_to_fidelity_band("coherent", haar_unitary(3, 32), 1.0, 0.005, [33])
        assert spec.eta == 0.0
        assert spec.achieved_fidelity == 1.0

    def test_incoherent_band(self):
        d = 5
        u_t = haar_unitary(d, 34)
        spec = calibrate_to_fidelity_band("incoherent", u_t, 0.83, 0.005, [35])
        assert abs(spec.achieved_fidelity - 0.83) <= 0.005
        assert 0 <= spec.xi <= 1

    def test_unreachable_incoherent_band(self):
        d = 2
        u_t = haar_unitary(d, 36)
        # the Ginibre-Choi draws at this seed never mix strongly enough to
        # reach a 0.05 target with xi <= 1
        with pytest.raises(UnreachableBandError):
            calibrate_to_fidelity_band(
                "incoherent", u_t, 0.05, 1e-6, [37], max_retries=3
            )

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidArgumentError):
            calibrate_to_fidelity_band("thermal", np.eye(2), 0.9, 0.01, [38])
