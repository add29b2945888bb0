"""Command-line interface.

Subcommands: simulate, check, synthesize, repro, necessity.
Exit codes: 0 pass, 1 condition failure, 2 input error, 3 internal or
inconclusive.  Output is JSON with sorted keys, so a rerun with identical
flags produces byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import sys

from .algorithms import AlgorithmSpec, HALT, HULL_CONTRACTION, as_controller
from .checker import check_all
from .engine import Adversary, NONRIGID, RIGID, Trace, simulate
from .errors import InputError, SimulationError
from .experiments import necessity_experiment, repro_colorbased, repro_greedy_trap
from .scheduling import (
    Schedule,
    check_fairness_prefix,
    make_fsync_schedule,
    sample_async_schedule,
)
from .scenarios import NECESSITY_TEMPLATES, builtin_bundle, bundle_from_json
from .synchronizer import MACHINES, SVP, run_synchronized
from .synthesis import build_plan, replay_plan, similar

EXIT_PASS = 0
EXIT_CONDITION = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _dump(data: dict, out: str | None) -> None:
    text = json.dumps(data, sort_keys=True, indent=1) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_bundle(ref: str) -> dict:
    if ref.startswith("builtin:"):
        return bundle_from_json(builtin_bundle(ref[len("builtin:"):]))
    return bundle_from_json(_load_json(ref))


def _parse_schedule(spec: str | None, bundle: dict, n: int, seed: int,
                    horizon: float) -> Schedule:
    if spec is None:
        if bundle["schedule"] is None:
            raise InputError("no schedule: pass --schedule or embed one in the scenario")
        return bundle["schedule"]
    if spec.startswith("fsync:"):
        return make_fsync_schedule(int(spec.split(":", 1)[1]), n)
    if spec.startswith("async:"):
        return sample_async_schedule(seed, n, float(spec.split(":", 1)[1]))
    if spec == "async":
        return sample_async_schedule(seed, n, horizon)
    return Schedule.from_json(_load_json(spec))


def _parse_algorithm(spec: str | None, bundle: dict) -> AlgorithmSpec:
    if spec is None:
        if bundle["algorithm"] is None:
            raise InputError("no algorithm: pass --algo or embed one in the scenario")
        return bundle["algorithm"]
    if spec == HALT:
        return AlgorithmSpec(HALT)
    if spec.startswith("hull:"):
        return AlgorithmSpec(HULL_CONTRACTION, contraction=float(spec.split(":", 1)[1]))
    return AlgorithmSpec.from_json(_load_json(spec))


def cmd_simulate(args: argparse.Namespace) -> int:
    bundle = _load_bundle(args.scenario)
    scenario = bundle["scenario"]
    schedule = _parse_schedule(args.schedule, bundle, scenario.n, args.seed, args.horizon)
    if args.fairness_window is not None:
        verdicts = check_fairness_prefix(schedule, args.fairness_window)
        if not all(verdicts):
            lazy = [i for i, ok in enumerate(verdicts) if not ok]
            print(f"schedule fails the fairness proxy for robots {lazy} "
                  f"(window {args.fairness_window})", file=sys.stderr)
            return EXIT_CONDITION
    algorithm = _parse_algorithm(args.algo, bundle)
    mode = args.adversary or bundle["adversary_mode"] or NONRIGID
    adversary = Adversary(args.seed, mode)
    if args.machine is None:
        machine = bundle["machine"]
    else:
        machine = None if args.machine == "none" else args.machine
    if machine:
        trace = run_synchronized(scenario, algorithm, schedule, adversary, machine)
    else:
        trace = simulate(scenario, schedule, as_controller(algorithm), adversary)
    _dump(trace.to_json(), args.out)
    return EXIT_PASS


def _report_exit(report) -> int:
    if report.all_pass:
        return EXIT_PASS
    results = (report.stationary, report.aligned, report.consistent,
               report.serializable, report.natural)
    if any(r.verdict == "fail" for r in results):
        return EXIT_CONDITION
    return EXIT_INTERNAL  # only open-at-horizon verdicts


def cmd_check(args: argparse.Namespace) -> int:
    trace = Trace.from_json(_load_json(args.trace))
    report = check_all(trace, node_budget=args.budget)
    _dump(report.to_json(), args.out)
    return _report_exit(report)


def cmd_synthesize(args: argparse.Namespace) -> int:
    trace = Trace.from_json(_load_json(args.trace))
    report = check_all(trace, node_budget=args.budget)
    if not report.all_pass:
        _dump({"schema": 1, "refused": True, "report": report.to_json()}, args.out)
        return _report_exit(report)
    plan = build_plan(trace, report.natural_order)
    replayed = replay_plan(trace.scenario, plan)
    verdict = similar(trace, replayed)
    _dump({
        "schema": 1,
        "refused": False,
        "plan": plan.to_json(),
        "replay": replayed.to_json(),
        "similar": verdict.to_json(),
    }, args.out)
    return EXIT_PASS if verdict.ok else EXIT_CONDITION


def cmd_repro(args: argparse.Namespace) -> int:
    if args.name == "greedy-lemma":
        result = repro_greedy_trap()
    elif args.name == "colorbased-theorem":
        result = repro_colorbased(machine=args.machine or SVP)
    else:
        raise InputError(f"unknown reproduction {args.name!r}")
    _dump(result, args.out)
    return EXIT_PASS if result["ok"] else EXIT_CONDITION


def cmd_necessity(args: argparse.Namespace) -> int:
    if args.seeds < 1:
        raise InputError("necessity sweeps need at least one seed")
    result = necessity_experiment(args.template, args.seeds,
                                  order_budget=args.order_budget,
                                  node_budget=args.budget)
    _dump(result, args.out)
    if result["materialized"]:
        if result["found_given_violation"]:
            return EXIT_CONDITION
        if result["inconclusive_rate"] and result["inconclusive_rate"] >= 0.05:
            return EXIT_INTERNAL
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robosync",
        description="Simulate Look-Compute-Move robot systems, check whether an "
                    "asynchronous trace admits a similar semi-synchronous replay, "
                    "and exercise the luminous cycle synchronizers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", default="json", choices=["json"])
        p.add_argument("--budget", type=int, default=10 ** 6,
                       help="node budget for order enumeration")

    p = sub.add_parser("simulate", help="run one simulation and write its trace")
    p.add_argument("--scenario", required=True,
                   help="scenario JSON path or builtin:<name>")
    p.add_argument("--schedule", help="fsync:N, async[:horizon], or a schedule JSON path")
    p.add_argument("--algo", help="halt, hull:<lambda>, or an algorithm JSON path")
    p.add_argument("--machine", choices=["none", *MACHINES],
                   help="'none' forces a plain run even if the scenario embeds a machine")
    p.add_argument("--adversary", choices=[RIGID, NONRIGID])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=50.0)
    p.add_argument("--fairness-window", type=float,
                   help="refuse schedules where some robot has a look-free "
                        "window of this length")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="run the five conditions on a trace")
    p.add_argument("trace")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synthesize",
                       help="build and verify the normal-form replay of a trace")
    p.add_argument("trace")
    common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("repro", help="run a built-in counterexample reproduction")
    p.add_argument("name", choices=["greedy-lemma", "colorbased-theorem"])
    p.add_argument("--machine", choices=list(MACHINES))
    common(p)
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("necessity", help="Monte Carlo violation sweep")
    p.add_argument("--template", required=True, choices=sorted(NECESSITY_TEMPLATES))
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--order-budget", type=int, default=256)
    common(p)
    p.set_defaults(func=cmd_necessity)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SimulationError as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
