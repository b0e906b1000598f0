"""``qcut`` command-line front end.

Stages talk only through files: circuit JSON, pair directories with a
manifest, and CSV/JSON reports on stdout.

Exit codes: 0 success, 1 verification failure, 2 validation error,
3 unsupported split, 4 observable error, 5 size limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

from .cutter import enumerate_all, pair_to_dict, plan_cuts, plan_to_dict
from .errors import NoCutNeeded, PartitionMissing, QcutError, ValidationError
from .estimate import (STRATEGY_ROWS, overhead_table, plan_gamma, reconstruct_exact,
                       reconstruct_mc, uncut_expectation, _check_tractable)
from .ir import GateKind, PauliObservable, parse_circuit, serialize_circuit, validate_partition
from .mcx_decompose import Strategy, decompose_all, verify_decomposition
from .qpd import dump_tables
from .sim import run_shots

DEMOS = ("cccx", "cccx_split", "mcx6")


def demo_text(name: str) -> str:
    if name not in DEMOS:
        raise ValidationError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    return resources.files("qcut").joinpath("demos", f"{name}.json").read_text()


def load(path: str):
    """Read a circuit file; ``demo:NAME`` loads a bundled demo."""
    if path.startswith("demo:"):
        return parse_circuit(demo_text(path[5:]))
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from None
    return parse_circuit(text)


def emit(obj):
    print(json.dumps(obj, sort_keys=True))


def cmd_decompose(args):
    c = load(args.input)
    if c.partition is None:
        raise PartitionMissing()
    if not any(g.kind in (GateKind.CCX, GateKind.MCX) for g in c.gates):
        raise ValidationError("no mcx/ccx gate to decompose")
    out, results = decompose_all(c, args.strategy, args.fuse_b)
    if not results:
        raise NoCutNeeded("no mcx/ccx gate crosses the partition")
    Path(args.output).write_text(serialize_circuit(out) + "\n")
    crossings = validate_partition(out)
    emit({
        "strategy": Strategy(args.strategy).value,
        "decomposed": [{
            "gate_index": r.start,
            "crossing_gates": r.crossing_gate_count,
            "crossing_wires": r.crossing_wire_count,
            "ancillas": [{"name": a.name, "qubit": a.qubit, "dirty": a.dirty} for a in r.ancillas],
        } for r in results],
        "crossing_gates": len(crossings.gates),
        "crossing_wires": len(crossings.wires),
    })
    return 0


def _prepare(args):
    c = load(args.input)
    if c.partition is None:
        raise PartitionMissing()
    if args.strategy:
        c, _ = decompose_all(c, args.strategy, args.fuse_b)
    return c, plan_cuts(c)


def cmd_cut(args):
    c, plan = _prepare(args)
    _check_tractable(plan)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, (_, pair) in enumerate(enumerate_all(c, plan)):
        name = f"pair_{k:05d}.json"
        d = pair_to_dict(pair)
        (out / name).write_text(json.dumps(d, indent=2) + "\n")
        entries.append({"file": name, **{key: d[key] for key in
                        ("assignment", "coefficient", "sign_rules", "mapping_a", "mapping_b")}})
    manifest = {"format": "qcut-1", "qubits": list(c.qubit_names), **plan_to_dict(plan),
                "pairs": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    emit({"pairs": len(entries), "gamma": float(plan.gamma), "out": str(out)})
    return 0


def cmd_estimate(args):
    obs = PauliObservable.parse(args.observable)
    if args.no_cut:
        c = load(args.input)
        emit({"value": uncut_expectation(c, obs), "std_error": 0.0, "gamma": 1.0, "samples": 0})
        return 0
    c, plan = _prepare(args)
    if args.samples == 0:
        est = reconstruct_exact(c, plan, obs, jobs=args.jobs)
    else:
        est = reconstruct_mc(c, plan, obs, args.samples, args.seed, jobs=args.jobs)
    d = est.as_dict()
    if args.classical_comm:
        d["gamma"] = plan_gamma(plan, classical_comm=True)
        d["analytic"] = True
        print("warning: classical-communication gamma is analytic; the value was computed "
              "with the standard cut bases", file=sys.stderr)
    emit(d)
    return 0


def cmd_run(args):
    c = load(args.input)
    if args.observable:
        emit({"value": uncut_expectation(c, PauliObservable.parse(args.observable))})
        return 0
    counts = {}
    for o in run_shots(c, 0, args.shots, args.seed):
        key = format(o.bitstring, f"0{c.num_qubits}b")
        if o.classbits:
            key += ":" + "".join(map(str, o.classbits))
        counts[key] = counts.get(key, 0) + 1
    emit({"shots": args.shots, "counts": counts})
    return 0


def cmd_verify(args):
    r = verify_decomposition(args.m1, args.m2, args.strategy, args.fuse_b)
    status = "PASS" if r.passed else "FAIL"
    print(f"{status} strategy={r.strategy.value} m1={r.m1} m2={r.m2} inputs={r.inputs_checked} "
          f"max_deviation={r.max_deviation:.3e} ancillas_ok={str(r.ancilla_states_ok).lower()}")
    return 0 if r.passed else 1


def cmd_overhead(args):
    sys.stdout.write(overhead_table(args.n, args.strategies).to_csv())
    return 0


def cmd_qpd(args):
    print(dump_tables())
    return 0


def cmd_demo(args):
    text = demo_text(args.name)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcut", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    strategies = [s.value for s in Strategy]

    def with_io(sp, out_help=None):
        sp.add_argument("--in", dest="input", required=True,
                        help="circuit JSON file, or demo:NAME")
        if out_help:
            sp.add_argument("--out", dest="output", required=True, help=out_help)

    def with_strategy(sp, required):
        sp.add_argument("--strategy", choices=strategies, required=required)
        sp.add_argument("--fuse-b", action="store_true",
                        help="dec2ad with no target-side controls: drop b, cut CX(a->t)")

    sp = sub.add_parser("decompose", help="decompose crossing MCX gates")
    with_io(sp, "decomposed circuit JSON; the crossing report goes to stdout")
    with_strategy(sp, True)
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("cut", help="write every subcircuit pair plus a manifest")
    with_io(sp, "output directory")
    with_strategy(sp, False)
    sp.set_defaults(fn=cmd_cut)

    sp = sub.add_parser("estimate", help="reconstruct an expectation value")
    with_io(sp)
    with_strategy(sp, False)
    sp.add_argument("--observable", required=True, help='Pauli string, e.g. "Z3" or "Z0*X2"')
    sp.add_argument("--samples", type=int, default=0, help="0 for exact reconstruction")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=_positive, default=1)
    sp.add_argument("--classical-comm", action="store_true")
    sp.add_argument("--no-cut", action="store_true", help="simulate the input uncut instead")
    sp.set_defaults(fn=cmd_estimate)

    sp = sub.add_parser("run", help="simulate a circuit")
    with_io(sp)
    sp.add_argument("--shots", type=_positive, default=1024)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--observable")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("verify", help="exhaustively check a decomposition")
    sp.add_argument("--m1", type=int, required=True)
    sp.add_argument("--m2", type=int, required=True)
    sp.add_argument("--strategy", choices=strategies, required=True)
    sp.add_argument("--fuse-b", action="store_true")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("overhead", help="sampling overhead table as CSV")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--strategies", nargs="+", choices=STRATEGY_ROWS, default=list(STRATEGY_ROWS))
    sp.set_defaults(fn=cmd_overhead)

    sp = sub.add_parser("qpd", help="show the QPD term tables")
    sp.add_argument("--dump", action="store_true", required=True)
    sp.set_defaults(fn=cmd_qpd)

    sp = sub.add_parser("demo", help="print or write a bundled demo circuit")
    sp.add_argument("name", choices=DEMOS)
    sp.add_argument("--out", dest="output")
    sp.set_defaults(fn=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.fn(args)
    except QcutError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return ValidationError.exit_code


if __name__ == "__main__":
    sys.exit(main())
