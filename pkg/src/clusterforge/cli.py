"""Command-line front end: build, verify, count, error, parallelize.

Exit codes: 0 success / verification pass, 1 verification failure,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import compiler, errormodel
from .densesim import CapExceeded
from .verify import BACKENDS, verify_schedule

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> compiler.Schedule:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        return compiler.from_json(text)
    except compiler.ScheduleError as exc:
        raise UsageError(str(exc)) from exc


def box2_demo() -> compiler.Schedule:
    """Two 2-qubit strings joined by a Type-II box between qubits 1 and 2."""
    base = compiler.merge(compiler.build_string(2), compiler.build_string(2))
    s = compiler.build_box_type2(base, 1, 2)
    return compiler.Schedule(s.ops, s.target, "box2")


def cmd_build(args) -> int:
    if args.string is not None:
        if args.string < 1:
            raise UsageError("--string needs n >= 1")
        s = compiler.build_string(args.string)
    elif args.star is not None:
        if args.star < 1:
            raise UsageError("--star needs k >= 1")
        s = compiler.build_star(args.star)
    elif args.box1:
        s = compiler.build_box_type1()
    elif args.box2:
        s = box2_demo()
    else:
        if args.lattice < 2:
            raise UsageError("--lattice needs n >= 2")
        s = compiler.build_lattice(args.lattice)
    _emit(compiler.to_json(s), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    s = _load(args.schedule)
    try:
        report = verify_schedule(s, args.backend, args.seed, args.allow_frame)
    except CapExceeded as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps(report.as_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_count(args) -> int:
    s = _load(args.schedule)
    rc = compiler.count_resources(s)
    bonds = len(s.target.edges)
    ratio = rc.entangler_equiv / bonds if bonds else None
    summary = {"target": s.name, **rc.as_dict(), "bonds": bonds, "equiv_per_bond": ratio}
    if args.json:
        print(json.dumps(summary))
        return EXIT_OK
    width = max(len(k) for k in summary)
    for key, value in summary.items():
        if key == "equiv_per_bond" and value is not None:
            value = f"{value:.2f}"
        print(f"{key:<{width}}  {value}")
    return EXIT_OK


def cmd_error(args) -> int:
    try:
        base = errormodel.EntanglerParams(args.alpha, args.gamma, args.theta, args.eta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.sweep:
        try:
            axis, values = errormodel.parse_range(args.sweep)
            rows = errormodel.sweep(base, axis, values)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _emit(errormodel.to_csv(axis, rows), args.out)
        return EXIT_OK
    regime = errormodel.regime_check(base, args.threshold)
    p_error = errormodel.error_probability(base)
    lines = [
        f"p_error,{p_error:.12g}",
        f"success_n40,{errormodel.schedule_success(base, errormodel.REFERENCE_EQUIV):.12g}",
        f"alpha_sin_theta,{regime.alpha_sin_theta:.12g}",
        f"eta_gamma2_theta2,{regime.eta_gamma2_theta2:.12g}",
        f"deterministic,{str(regime.deterministic).lower()}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_parallelize(args) -> int:
    s = _load(args.schedule)
    ts = compiler.parallelize(s)
    summary = {
        "target": s.name,
        "ops": len(s.ops),
        "makespan": ts.makespan,
        "max_concurrent_entanglers": ts.max_concurrent_entanglers,
        "max_concurrent_cz": ts.max_concurrent_cz,
    }
    if args.steps:
        summary["steps"] = [[str(op) for op in step] for step in ts.steps]
    print(json.dumps(summary, indent=2 if args.steps else None))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clusterforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="synthesize a schedule as JSON")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--string", type=int, metavar="N")
    which.add_argument("--star", type=int, metavar="K")
    which.add_argument("--box1", action="store_true", help="standalone Type-I box")
    which.add_argument("--box2", action="store_true", help="Type-II box joining two 2-strings")
    which.add_argument("--lattice", type=int, metavar="N")
    p.add_argument("-o", "--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="simulate and check target-graph stabilizers")
    p.add_argument("schedule")
    p.add_argument("--backend", choices=BACKENDS, default="tableau")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-frame", action="store_true", help="accept sign errors fixable by Z corrections")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="resource table")
    p.add_argument("schedule")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("error", help="entangler error probability or CSV sweep")
    for name in errormodel.PARAM_NAMES:
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--threshold", type=float, default=errormodel.DEFAULT_THRESHOLD)
    p.add_argument("--sweep", metavar="AXIS=START:STOP:STEPS")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("parallelize", help="time-step a schedule under operand-disjoint concurrency")
    p.add_argument("schedule")
    p.add_argument("--steps", action="store_true", help="include the op list of every step")
    p.set_defaults(func=cmd_parallelize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"clusterforge {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
