"""Tests for the batch experiment harness: spec handling, probe orderings,
row schemas, and byte-level determinism of the CSV output."""
import io

import numpy as np
import pytest

from uniqpt._linalg import frob
from uniqpt.errors import InvalidArgumentError
from uniqpt.harness import (
    ALL_ESTIMATORS,
    BAND_WIDTH,
    FIG1_ORDERINGS,
    ExperimentSpec,
    experiment_csv_text,
    ordered_probes,
    run_fig1,
    run_fig2,
    run_fig3,
)
from uniqpt.probes import standard_probe_kets, uic_pure_plus, uic_pure_zero_n
from uniqpt.serialize import read_csv


class TestExperimentSpec:
    def test_defaults(self):
        spec = ExperimentSpec(experiment="fig2")
        assert spec.dim == 5 and spec.trials == 20 and spec.sigma == 1e-4
        assert spec.orderings == FIG1_ORDERINGS
        assert spec.estimators == ALL_ESTIMATORS

    def test_unknown_experiment_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ExperimentSpec(experiment="fig9")

    @pytest.mark.parametrize(
        "kw", [{"dim": 1}, {"trials": 0}, {"sigma": -1e-4}]
    )
    def test_bad_parameters_rejected(self, kw):
        with pytest.raises(InvalidArgumentError):
            ExperimentSpec(experiment="fig1", **kw)

    def test_meta_schema_kind(self):
        assert ExperimentSpec(experiment="fig3").meta()["schema_kind"] == "fig3"

    def test_from_json_round_trip(self):
        spec = ExperimentSpec(
            experiment="fig1", dim=3, trials=2, sigma=0.0, master_seed=7,
            estimators=("LS",), bands=(0.9,),
        )
        doc = (
            '{"experiment": "fig1", "dim": 3, "trials": 2, "sigma": 0.0,'
            ' "master_seed": 7, "estimators": ["LS"], "bands": [0.9]}'
        )
        assert ExperimentSpec.from_json(doc) == spec


class TestOrderedProbes:
    def test_nc_is_standard_set(self):
        p = ordered_probes(3, "nc")
        q = standard_probe_kets(3)
        assert np.allclose(p.states, q.states)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_uic_0n_head_and_dedupe(self, d):
        p = ordered_probes(d, "uic-0n-then-nc")
        head = uic_pure_zero_n(d)
        assert np.allclose(p.states[:d], head.states)
        # the head states all belong to the standard family, so the merged
        # sequence has exactly d^2 distinct states
        assert len(p) == d * d
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                assert frob(p.states[i] - p.states[j]) > 1e-9

    def test_uic_nplus_head(self):
        d = 3
        p = ordered_probes(d, "uic-n+-then-mub")
        head = uic_pure_plus(d)
        assert np.allclose(p.states[: len(head)], head.states)

    def test_unknown_ordering_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ordered_probes(3, "reverse")


FAST_FIG1 = ExperimentSpec(experiment="fig1", dim=2, trials=1, sigma=1e-4,
                           master_seed=11)
FAST_FIG2 = ExperimentSpec(experiment="fig2", dim=2, trials=1, sigma=1e-4,
                           master_seed=11, estimators=("LS",), max_iter=20_000)
FAST_FIG3 = ExperimentSpec(experiment="fig3", dim=2, trials=1, sigma=1e-4,
                           master_seed=11, estimators=("LS",), bands=(0.9,),
                           max_iter=20_000)


class TestFig1:
    def test_schema_and_recovery(self):
        meta, cols, rows = run_fig1(FAST_FIG1)
        assert cols == ["ordering", "trial", "k", "fidelity", "converged", "iterations"]
        d2 = FAST_FIG1.dim ** 2
        assert len(rows) == len(FAST_FIG1.orderings) * FAST_FIG1.trials * d2
        # with the full probe set and mild noise LS recovers the target map
        for ordering in FAST_FIG1.orderings:
            final = [r[3] for r in rows if r[0] == ordering and r[2] == d2]
            assert min(final) > 0.999

    def test_fidelity_bounded(self):
        _, _, rows = run_fig1(FAST_FIG1)
        assert all(0.0 <= r[3] <= 1.0 + 1e-9 for r in rows)


class TestFig2:
    def test_schema_and_error_sweeps(self):
        meta, cols, rows = run_fig2(FAST_FIG2)
        assert cols == ["kind", "trial", "point", "param", "f_target_applied",
                        "estimator", "f_est_applied", "converged", "iterations"]
        coh = [r for r in rows if r[0] == "coherent"]
        inc = [r for r in rows if r[0] == "incoherent"]
        assert len(coh) == 8 and len(inc) == 9
        # the coherent sweep starts error-free and the incoherent xi grid
        # starts at zero, where the applied map is the target
        assert coh[0][3] == 0.0 and coh[0][4] == 1.0
        assert inc[0][3] == 0.0 and inc[0][4] == 1.0
        # applied-target fidelities decrease along each sweep
        assert all(x >= y - 1e-12 for x, y in zip(
            [r[4] for r in coh], [r[4] for r in coh][1:]))
        assert all(x >= y - 1e-12 for x, y in zip(
            [r[4] for r in inc], [r[4] for r in inc][1:]))

    def test_estimates_track_applied_map(self):
        _, _, rows = run_fig2(FAST_FIG2)
        # coherent errors keep the applied map unitary, so UIC data suffices
        # for LS to estimate it accurately; incoherent maps need more probes
        coh = [r[6] for r in rows if r[0] == "coherent"]
        assert np.mean(coh) > 0.99


class TestFig3:
    def test_schema_and_band(self):
        meta, cols, rows = run_fig3(FAST_FIG3)
        assert cols == ["kind", "band", "trial", "estimator", "k",
                        "f_target_applied", "f_est_applied", "f_est_target",
                        "converged", "iterations"]
        d2 = FAST_FIG3.dim ** 2
        assert len(rows) == 2 * len(FAST_FIG3.bands) * FAST_FIG3.trials * d2
        for r in rows:
            assert abs(r[5] - 0.9) <= BAND_WIDTH + 1e-12

    def test_final_k_estimates_applied_map(self):
        _, _, rows = run_fig3(FAST_FIG3)
        d2 = FAST_FIG3.dim ** 2
        finals = [r[6] for r in rows if r[4] == d2]
        assert min(finals) > 0.99


class TestCsvDeterminism:
    def test_byte_identical_reruns(self):
        a = experiment_csv_text(FAST_FIG1)
        b = experiment_csv_text(FAST_FIG1)
        assert a == b

    def test_seed_changes_output(self):
        other = ExperimentSpec(experiment="fig1", dim=2, trials=1, sigma=1e-4,
                               master_seed=12)
        assert experiment_csv_text(FAST_FIG1) != experiment_csv_text(other)

    def test_csv_round_trip(self):
        text = experiment_csv_text(FAST_FIG1)
        meta, cols, rows = read_csv(io.StringIO(text))
        assert meta["schema_kind"] == "fig1"
        assert meta["dim"] == "2"
        assert cols[0] == "ordering"
        assert len(rows) == 3 * 4
        # float cells round-trip exactly through repr()
        assert all(repr(float(r[3])) == r[3] for r in rows)
