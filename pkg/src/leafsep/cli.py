"""Command line entry point.

Subcommands: synthesize, simulate, check-separable, random-state,
bench-fidelity, bench-cost.  Exit codes: 0 success, 1 domain error
(e.g. non-separable input under --strict), 2 I/O or parse error.
Machine-readable output goes to stdout or files; diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import analysis, circuit, experiments, simulator, synthesis
from .core import StateVector, build_partition_tree


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_state(path: str, normalize: bool = False) -> StateVector:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from exc
    return StateVector.from_json_dict(data, normalize=normalize)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_synthesize(args) -> int:
    psi = _load_state(args.input, normalize=args.normalize)
    config = synthesis.SynthesisConfig(
        n=args.n, k=args.k, ell=args.ell,
        mode=synthesis.MODE_ANCILLA if args.mode == "ancilla" else synthesis.MODE_FREE,
        complex_phases=not args.magnitudes_only)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        circ = synthesis.synthesize_full(psi, config)
    separable = circ.metadata.get("separable", True)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.strict and not separable:
        return _fail(1, "input is not leaf-separable (strict mode)")
    _write(args.out, circuit.export_text(circ))
    return 0


def _cmd_simulate(args) -> int:
    circ = circuit.parse_text(open(args.circuit).read())
    if args.input is None:
        initial = None
    elif args.input.startswith("basis:"):
        initial = args.input[len("basis:"):]
        if len(initial) != circ.n_system or set(initial) - {"0", "1"}:
            return _fail(2, f"bad basis string {initial!r} for {circ.n_system} wires")
    else:
        initial = _load_state(args.input)
    target = _load_state(args.target) if args.target else None
    result = simulator.simulate(circ, initial=initial, target=target)
    report = {
        "fidelity": result.fidelity,
        "purity": result.purity if result.purity is not None
        else simulator.system_purity(result.state, circ.n_system),
        "norm": result.norm,
        "wires": {"system": circ.n_system, "ancilla": circ.n_ancilla},
    }
    _write(args.report, json.dumps(report, indent=2) + "\n")
    return 0


def _cmd_check_separable(args) -> int:
    psi = _load_state(args.input, normalize=args.normalize)
    if psi.n != args.n:
        return _fail(1, f"state has {psi.n} qubits, expected {args.n}")
    tree = build_partition_tree(args.n, args.k)
    report = analysis.is_leaf_separable(psi, tree, tol=args.tol)
    _write(args.out, json.dumps(report.to_json_dict(), indent=2) + "\n")
    if args.strict and not report.separable:
        return 1
    return 0


def _cmd_random_state(args) -> int:
    if args.mixed:
        psi = experiments.random_mixed_leaf_separable(args.n, args.k, args.field,
                                                      seed=args.seed)
    else:
        ell = args.ell if args.ell is not None else max(1, args.n // 2)
        psi = experiments.random_leaf_separable(args.n, args.k, ell, args.field,
                                                seed=args.seed)
    _write(args.out, psi.dumps() + "\n")
    return 0


def _parse_n_range(args) -> tuple[int, ...]:
    return tuple(range(args.n_min, args.n_max + 1))


def _cmd_bench_fidelity(args) -> int:
    k_values = None if args.k == "all" else (int(args.k),)
    states = 200 if args.paper_scale else args.states
    n_values = tuple(range(args.n_min, (15 if args.paper_scale else args.n_max) + 1))
    config = experiments.ExperimentConfig(
        n_values=n_values, k_values=k_values, ell=args.ell,
        states_per_cell=states, seed=args.seed, kind=args.field,
        modes=tuple(args.modes.split(",")))
    rows = experiments.run_fidelity_sweep(config)
    _write(args.out, experiments.fidelity_rows_to_csv(rows))
    return 0


def _cmd_bench_cost(args) -> int:
    config = experiments.ExperimentConfig(n_values=_parse_n_range(args), seed=args.seed)
    rows = experiments.run_cost_sweep(config)
    _write(args.out, experiments.cost_rows_to_csv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leafsep",
        description="Synthesize, simulate and benchmark leaf-separable state "
                    "preparation circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="compile a target state to a circuit")
    p.add_argument("--input", required=True, help="target state JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--mode", choices=("free", "ancilla"), default="free")
    p.add_argument("--complex", action="store_true",
                   help="honor amplitude phases (default on)")
    p.add_argument("--magnitudes-only", action="store_true",
                   help="skip all phase-correction gates")
    p.add_argument("--normalize", action="store_true",
                   help="normalize the input state first")
    p.add_argument("--strict", action="store_true",
                   help="fail with exit code 1 on non-separable input")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("simulate", help="run a circuit on the dense simulator")
    p.add_argument("--circuit", required=True)
    p.add_argument("--input", default=None,
                   help="state JSON or basis:BITSTRING (default all zeros)")
    p.add_argument("--target", default=None, help="target state JSON for fidelity")
    p.add_argument("--report", default="-")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check-separable", help="test the product condition")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_check_separable)

    p = sub.add_parser("random-state", help="sample a random leaf-separable state")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mixed", action="store_true",
                   help="superpose weights 0..n/2 instead of one fixed weight")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_random_state)

    p = sub.add_parser("bench-fidelity", help="fidelity sweep CSV")
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--k", default="all")
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--states", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.add_argument("--modes", default="free")
    p.add_argument("--paper-scale", action="store_true",
                   help="200 states per cell over 4..15 qubits")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_bench_fidelity)

    p = sub.add_parser("bench-cost", help="worst-case gate count CSV")
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=14)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_bench_cost)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail(2, f"cannot open {exc.filename}")
    except (circuit.ParseError, json.JSONDecodeError) as exc:
        return _fail(2, str(exc))
    except ValueError as exc:
        if "invalid JSON" in str(exc):
            return _fail(2, str(exc))
        return _fail(1, str(exc))


if __name__ == "__main__":
    sys.exit(main())
