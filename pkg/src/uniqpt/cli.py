"""Command-line interface: dump probe/POVM constructions, simulate records,
run estimators, reconstruct unitaries, and drive the figure experiments."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bases import gellmann_basis, rotated_basis, traceless_identity_basis
from .channels import haar_unitary, process_fidelity, unitary_fidelity
from .closed_form import (
    minimal_probability_tables,
    reconstruct_from_mixed_uic,
    reconstruct_minimal,
    reconstruct_sequential,
)
from .errors import UniqptError
from .harness import ExperimentSpec, experiment_csv_text, ordered_probes
from .maps import (
    apply_map,
    choi_to_kraus,
    kraus_to_choi,
    kraus_to_process,
    unitary_to_choi,
    unitary_to_process,
)
from .measure import (
    design_matrices,
    probabilities,
    record_from_csv,
    record_to_csv,
    simulate_record,
)
from .probes import (
    commutant_dimension,
    default_mixed_spectrum,
    mub_bases,
    mub_povm,
    mub_probe_kets,
    pure_state_povm,
    standard_probe_kets,
    truncated_povm,
    uic_mixed,
    uic_pure_plus,
    uic_pure_zero_n,
)
from .serialize import dump_matrix, dump_matrix_stack
from .solver import EstimatorConfig, estimate_cs_l1, estimate_cs_tr, estimate_ls

PROBE_KINDS = {
    "nc": standard_probe_kets,
    "mub": mub_probe_kets,
    "uic-0n": uic_pure_zero_n,
    "uic-n+": uic_pure_plus,
    "uic-mixed": uic_mixed,
}


def _cmd_probe(args) -> int:
    p = PROBE_KINDS[args.kind](args.dim)
    text = dump_matrix_stack(p.states, p.dim, p.labels, kind=f"probe-set:{p.kind}")
    _write_out(args.out, text)
    return 0


def _cmd_povm(args) -> int:
    if args.kind == "pure":
        pov = pure_state_povm(args.dim)
    elif args.kind == "truncated":
        pov = truncated_povm(args.dim, args.k)
    else:
        pov = mub_povm(args.dim)
    text = dump_matrix_stack(
        pov.effects, pov.dim, pov.labels, kind=f"povm:{pov.kind}",
        n_informative=pov.n_informative,
    )
    _write_out(args.out, text)
    return 0


def _cmd_simulate(args) -> int:
    d = args.dim
    probes = ordered_probes(d, args.ordering)
    povm = pure_state_povm(d) if args.povm == "pure" else mub_povm(d)
    basis = gellmann_basis(d)
    u_t = haar_unitary(d, [args.seed, 0])
    design = design_matrices(probes, povm, basis)
    probs = probabilities(unitary_to_process(u_t, basis), design)
    rec = simulate_record(probs, args.sigma, [args.seed, 1], probes.kind, povm.kind)
    with _open_out(args.out) as fh:
        record_to_csv(rec, fh)
    return 0


def _cmd_estimate(args) -> int:
    d = args.dim
    with open(args.record) as fh:
        rec = record_from_csv(fh)
    probes = ordered_probes(d, rec.probe_kind)
    povm = pure_state_povm(d) if rec.povm_kind.startswith("pure") else mub_povm(d)
    probes = probes.prefix(rec.freqs.shape[0])
    u_t = haar_unitary(d, [args.target_seed, 0])
    if args.estimator == "LS":
        basis = gellmann_basis(d)
        fn = estimate_ls
    elif args.estimator == "CS_L1":
        basis = rotated_basis(u_t, gellmann_basis(d))
        fn = estimate_cs_l1
    else:
        basis = traceless_identity_basis(d)
        fn = estimate_cs_tr
    design = design_matrices(probes, povm, basis)
    est = fn(rec, design, EstimatorConfig(max_iter=args.max_iter))
    chi_t = unitary_to_process(u_t, basis)
    doc = dump_matrix(
        est.chi_hat.mat, d, kind=f"process-matrix:{basis.kind}",
        estimator=args.estimator, objective=est.objective, data_fit=est.data_fit,
        iterations=est.iterations, converged=est.converged,
        fidelity_vs_target=process_fidelity(est.chi_hat, chi_t),
    )
    _write_out(args.out, doc)
    return 0


def _cmd_reconstruct(args) -> int:
    with open(args.tables) as fh:
        doc = json.load(fh)
    if args.protocol == "minimal":
        tables = [np.asarray(t, float) for t in doc["tables"]]
        est = reconstruct_minimal(tables, doc.get("a"), doc.get("b"))
    elif args.protocol == "sequential":
        outs = [np.asarray(m)[..., 0] + 1j * np.asarray(m)[..., 1] for m in doc["outputs"]]
        est = reconstruct_sequential(outs)
    else:
        r0 = np.asarray(doc["rho0_out"])
        r1 = np.asarray(doc["rho1_out"])
        r0 = r0[..., 0] + 1j * r0[..., 1]
        r1 = r1[..., 0] + 1j * r1[..., 1]
        lam = np.asarray(doc.get("lam", default_mixed_spectrum(r0.shape[0])), float)
        est = reconstruct_from_mixed_uic(r0, r1, lam)
    out = dump_matrix(
        est.u, est.dim, kind=f"unitary-estimate:{est.method}",
        unitarity_residual=est.unitarity_residual,
        phase_convention=est.phase_convention,
        **{k: (bool(v) if isinstance(v, (bool, np.bool_)) else v)
           for k, v in est.diagnostics.items()
           if isinstance(v, (bool, np.bool_, int, float, str))},
    )
    _write_out(args.out, out)
    return 0


def _cmd_experiment(args) -> int:
    if args.config:
        spec = ExperimentSpec.from_json(Path(args.config).read_text())
        spec = ExperimentSpec(**{**spec.__dict__, "experiment": args.figure})
    else:
        spec = ExperimentSpec(
            experiment=args.figure,
            dim=args.dim,
            trials=args.trials,
            sigma=args.sigma,
            master_seed=args.seed,
        )
    text = experiment_csv_text(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{args.figure}.csv"
    path.write_text(text)
    print(path)
    return 0


def _cmd_validate(args) -> int:
    d = args.dim
    failures = []

    def check(name, ok):
        print(f"[{'ok' if ok else 'FAIL'}] {name}")
        if not ok:
            failures.append(name)

    rng = np.random.default_rng(0)
    basis = gellmann_basis(d)
    u = haar_unitary(d, 7)
    chi = unitary_to_process(u, basis)
    choi = unitary_to_choi(u)
    k2 = choi_to_kraus(choi)
    check("unitary round trip", np.linalg.norm(kraus_to_choi(k2).mat - choi.mat) < 1e-10)
    check("choi trace d", abs(np.trace(choi.mat).real - d) < 1e-9)
    rho = np.eye(d) / d
    check("identity action trace", abs(np.trace(apply_map(choi, rho)).real - 1) < 1e-10)
    check("uic-0n commutant", commutant_dimension(uic_pure_zero_n(d)) == 1)
    check("uic-n+ commutant", commutant_dimension(uic_pure_plus(d)) == 1)
    pov = pure_state_povm(d)
    check("povm completeness", np.linalg.norm(pov.effects.sum(0) - np.eye(d)) < 1e-10)
    if d in (2, 3, 5, 7):
        b = mub_bases(d)
        ok = True
        for b1 in range(d + 1):
            for b2 in range(b1 + 1, d + 1):
                ov = np.abs(b[b1].conj() @ b[b2].T) ** 2
                ok &= bool(np.allclose(ov, 1 / d, atol=1e-12))
        check("mub unbiasedness", ok)
    probes = standard_probe_kets(d)
    design = design_matrices(probes.prefix(3), pov, basis)
    p = probabilities(chi, design)
    check("row sums 1", np.allclose(p.sum(axis=1), 1.0, atol=1e-10))
    check("fidelity self", abs(process_fidelity(chi, chi) - 1) < 1e-10)
    v = haar_unitary(d, 8)
    chi_v = unitary_to_process(v, basis)
    check(
        "fidelity overlap form",
        abs(process_fidelity(chi, chi_v) - unitary_fidelity(u, v)) < 1e-8,
    )
    tab = minimal_probability_tables(u)
    est = reconstruct_minimal(tab)
    check("minimal protocol consistency", unitary_fidelity(est.u, u) > 1 - 1e-8
          or est.diagnostics.get("ambiguous", False))
    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


def _write_out(out, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(out).write_text(text + "\n")


def _open_out(out):
    if out is None or out == "-":
        return sys.stdout
    return open(out, "w")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uniqpt", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", help="dump a built-in probe set")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--kind", choices=sorted(PROBE_KINDS), default="nc")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_probe)

    p = sub.add_parser("povm", help="dump a built-in POVM")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--kind", choices=["pure", "truncated", "mub"], default="pure")
    p.add_argument("--k", type=int, default=0, help="truncation step")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_povm)

    p = sub.add_parser("simulate", help="simulate a measurement record")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--sigma", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ordering", default="nc")
    p.add_argument("--povm", choices=["pure", "mub"], default="mub")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("estimate", help="run an estimator on a record CSV")
    p.add_argument("--record", required=True)
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--estimator", choices=["LS", "CS_L1", "CS_TR"], default="LS")
    p.add_argument("--target-seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=50_000)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("reconstruct-unitary", help="closed-form reconstruction")
    p.add_argument("--protocol", choices=["mixed", "sequential", "minimal"], required=True)
    p.add_argument("--tables", required=True, help="JSON input file")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_reconstruct)

    p = sub.add_parser("experiment", help="run a figure experiment to CSV")
    p.add_argument("figure", choices=["fig1", "fig2", "fig3"])
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--sigma", type=float, default=1e-4)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("validate", help="run the invariant checks")
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(fn=_cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UniqptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
