import argparse
import logging
import sys

from qcomplex import config
from qcomplex.ampquant import check_condition_q, consistency_error, quantize, trace_quantum
from qcomplex.complexity import quantum_complexity_h, quantum_complexity_state
from qcomplex.core import StateVector, evolution_operator
from qcomplex.errors import QComplexError
from qcomplex.experiments import reproduce
from qcomplex.grover import GroverConfig, estimate_q, run_gsa
from qcomplex.symmetry import commutant, is_connected, is_equilibrium, lemma_column_permutation_check
from qcomplex.utils.fixtures import FIXTURE_KINDS, SYMMETRY_FAMILIES, gen_fixture
from qcomplex.utils.json_io import dumps_canonical, read_matrix, read_state, matrix_to_dict, state_to_dict, write_quanta
from qcomplex.utils.manifest import RunManifest


def configure_logging():
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.log_file():
        handlers.append(logging.FileHandler(config.log_file(), encoding="utf-8"))
    logging.basicConfig(
        level=config.log_level(),
        format="%(asctime)s %(levelname)s %(message)s",
        handlers=handlers,
    )


def _emit(record, manifest: RunManifest):
    record = dict(record, manifest=manifest.to_dict())
    sys.stdout.write(dumps_canonical(record) + "\n")


def _iterations(value):
    return value if value == "optimal" else int(value)


def _params(args):
    return {k: v for k, v in vars(args).items() if k not in ("handler", "command")}


# ==========================================
# SUBCOMMANDS
# ==========================================
def cmd_complexity(args):
    manifest = RunManifest.for_inputs("complexity", _params(args), [args.state, args.ham])
    if args.state:
        report = quantum_complexity_state(read_state(args.state), args.strategy, args.tol, args.depth)
    else:
        report = quantum_complexity_h(read_matrix(args.ham), args.strategy, args.tol, args.depth)
    _emit(report.to_dict(), manifest)


def cmd_symmetry(args):
    manifest = RunManifest.for_inputs("symmetry", _params(args), [args.ham, args.state])
    H, psi = read_matrix(args.ham), read_state(args.state)
    group = commutant(H, tol=args.tol)
    M = evolution_operator(H, args.t) if args.t is not None else H
    connectivity = is_connected(psi, H, args.tol, group)
    lemma_ok = None
    if connectivity.connected:
        lemma_ok = lemma_column_permutation_check(psi, M, H, args.tol, group).ok
    _emit(
        {
            "equilibrium": is_equilibrium(psi, M, args.tol),
            "connected": connectivity.connected,
            "group_order": group.order,
            "lemma_ok": lemma_ok,
            "h_psi_nonzero": connectivity.h_psi_nonzero,
            "missing_pair": list(connectivity.missing_pair) if connectivity.missing_pair else None,
        },
        manifest,
    )


def cmd_quantize(args):
    manifest = RunManifest.for_inputs("quantize", _params(args), [args.state, args.op])
    psi, A = read_state(args.state), read_matrix(args.op)
    theta = quantize(psi, A, args.eps, args.tol)
    ok, pair = check_condition_q(theta)
    record = {
        "epsilon": theta.epsilon,
        "nu": theta.nu,
        "c": theta.c_of_eps,
        "count": len(theta),
        "condition_q": ok,
        "violating_pair": list(pair) if pair else None,
        "consistency_error": consistency_error(psi, A, args.eps, args.tol),
    }
    if args.trace is not None:
        record["trajectory"] = trace_quantum(theta, args.trace).to_dict()
    if args.out:
        write_quanta(args.out, theta)
        manifest.add_output(args.out)
        manifest.write_sidecar(args.out)
    _emit(record, manifest)


def cmd_grover(args):
    manifest = RunManifest("grover", _params(args))
    cfg = GroverConfig(args.n, args.target, args.iters, args.eps_min, args.success_rule, args.jitter, args.seed)
    run = run_gsa(cfg)
    if args.csv:
        run.to_frame().to_csv(args.csv, index=False, float_format="%.17g")
        manifest.add_output(args.csv)
        manifest.write_sidecar(args.csv)
    _emit(
        {
            "n": cfg.n,
            "iterations": cfg.iteration_count,
            "success_iteration": run.success_iteration,
            "final_success_probability": run.final_success_probability,
            "collapsed": run.collapsed,
            "collapse_iteration": run.collapse_iteration,
            "renormalization_events": run.renormalization_events,
        },
        manifest,
    )


def cmd_estimate_q(args):
    manifest = RunManifest("estimate-q", _params(args))
    estimate = estimate_q(range(args.n_min, args.n_max + 1), args.eps_min, args.success_rule, args.target)
    if args.csv:
        estimate.to_frame().to_csv(args.csv, index=False, float_format="%.17g")
        manifest.add_output(args.csv)
        manifest.write_sidecar(args.csv)
    _emit(
        {
            "eps_min": args.eps_min,
            "predicted_q": estimate.predicted_q,
            "observed_onset": estimate.observed_onset,
            "rows": estimate.rows,
        },
        manifest,
    )


def cmd_gen_fixture(args):
    fixture_keys = ("n", "t", "target", "index", "control", "k", "n_max", "omega", "g", "hbar", "seed", "family",
                    "ham", "pattern")
    params = {k: getattr(args, k) for k in fixture_keys if getattr(args, k) is not None}
    manifest = RunManifest.for_inputs("gen-fixture", _params(args), [args.ham])
    obj, out = gen_fixture(args.kind, params, args.out)
    if out:
        manifest.add_output(out)
        manifest.write_sidecar(out)
        _emit({"kind": args.kind, "out": out}, manifest)
    else:
        record = state_to_dict(obj) if isinstance(obj, StateVector) else matrix_to_dict(obj)
        _emit(record, manifest)


def cmd_reproduce(args):
    manifest = RunManifest("reproduce", _params(args))
    written, status_log = reproduce(args.out_dir, args.quick)
    for path in written:
        manifest.add_output(path)
    _emit({"status": status_log}, manifest)


# ==========================================
# PARSER
# ==========================================
def build_parser():
    parser = argparse.ArgumentParser(prog="qcomplex", description="Quantum complexity and amplitude quantization toolkit.")
    parser.add_argument("--version", action="version", version=config.VERSION)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    p = sub.add_parser("complexity", help="naive and quantum complexity of a state or Hamiltonian")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--state")
    source.add_argument("--ham")
    p.add_argument("--strategy", choices=["exhaustive", "heuristic"], default="exhaustive")
    p.add_argument("--depth", type=int, default=None, help="CNOT circuit depth for the heuristic")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=cmd_complexity)

    p = sub.add_parser("symmetry", help="equilibrium, connectivity and the column-permutation check")
    p.add_argument("--ham", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--t", type=float, default=None, help="check U_t = exp(-iHt) instead of H")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=cmd_symmetry)

    p = sub.add_parser("quantize", help="amplitude quantization of A|psi>")
    p.add_argument("--state", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--trace", type=int, default=None, help="quantum id to trace")
    p.add_argument("--out", default=None, help="write the quanta JSON here")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=cmd_quantize)

    p = sub.add_parser("grover", help="Grover run with optional amplitude cutoff")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--eps-min", type=float, default=0.0)
    p.add_argument("--iters", type=_iterations, default="optimal")
    p.add_argument("--success-rule", choices=["half", "jump"], default="half")
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None)
    p.set_defaults(handler=cmd_grover)

    p = sub.add_parser("estimate-q", help="sweep n at a fixed cutoff to estimate Q")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=14)
    p.add_argument("--eps-min", type=float, required=True)
    p.add_argument("--success-rule", choices=["half", "jump"], default="half")
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--csv", default=None)
    p.set_defaults(handler=cmd_estimate_q)

    p = sub.add_parser("gen-fixture", help="write an example state or matrix as JSON")
    p.add_argument("kind", choices=FIXTURE_KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--target", type=int)
    p.add_argument("--index", type=int)
    p.add_argument("--control", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--g", help="one coupling or a comma-separated list")
    p.add_argument("--hbar", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--family", choices=SYMMETRY_FAMILIES)
    p.add_argument("--ham", help="Hamiltonian file for the connected fixture")
    p.add_argument("--pattern", help="comma-separated phases from +1,-1,+i,-i")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_gen_fixture)

    p = sub.add_parser("reproduce", help="run the acceptance experiments into an output directory")
    p.add_argument("--out-dir", default="outputs")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(handler=cmd_reproduce)

    return parser


def route(argv) -> int:
    """Dispatch argv to a subcommand. 0 on success, 1 on a domain error, 2 on a usage error."""
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    if getattr(args, "handler", None) is None:
        parser.print_usage(sys.stderr)
        return 2

    try:
        args.handler(args)
    except QComplexError as e:
        logging.error(f"{args.command} failed: {e}")
        sys.stderr.write(dumps_canonical(e.to_dict()) + "\n")
        return 1
    except OSError as e:
        logging.error(f"{args.command} failed: {e}")
        error = {"code": "io_error", "message": str(e), "context": {"path": getattr(e, "filename", None)}}
        sys.stderr.write(dumps_canonical(error) + "\n")
        return 1
    return 0


def main():
    configure_logging()
    sys.exit(route(sys.argv[1:]))


if __name__ == "__main__":
    main()
