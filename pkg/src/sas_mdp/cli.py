"""Command-line interface.

    sas solve   --instance PATH [--solver vi|pi|lp|embedded] [--oracle] [--out PATH]
    sas learn   --instance PATH [--steps N] [--horizon H] [--epsilon-end E]
                [--lr-exponent W] [--initial-q Q] [--out CSV]
    sas curve   [--p-grid 0.1,0.2,...] [--gamma G] [--out CSV]
    sas routing [--p-grid ...] [--nodes N] [--edge-avail R] [--no-bridge] [--out CSV]

Exit codes: 0 on success, 2 for malformed input, 3 when a solver does not
converge, 1 for any other failure. Errors are printed to stderr as a JSON
object with ``error``, ``message`` and ``details``.
"""

import argparse
import csv
import json
import logging
import sys
from contextlib import ExitStack
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence

from pydantic import ValidationError

from sas_mdp.config import LOG_LEVELS, SolverSettings, configure_logging
from sas_mdp.core.instance_io import load_instance
from sas_mdp.experiments import routing_comparison, two_state_curve
from sas_mdp.experiments.two_state import DEFAULT_P_GRID
from sas_mdp.rl import TrajectoryRecorder
from sas_mdp.services import SolverService
from sas_mdp.utils.errors import (
    BadSampleCountError,
    DisconnectedGraphError,
    EmptySetError,
    InstanceFormatError,
    InstanceValidationError,
    IterationBoundOverflowError,
    MaxRoundsExceededError,
    NotConvergedError,
    SasError,
    TooLargeError,
    UnsupportedModelError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3

INPUT_ERRORS = (
    InstanceFormatError,
    InstanceValidationError,
    BadSampleCountError,
    UnsupportedModelError,
    TooLargeError,
    EmptySetError,
    DisconnectedGraphError,
    IterationBoundOverflowError,
)
CONVERGENCE_ERRORS = (NotConvergedError, MaxRoundsExceededError)

DEFAULT_ROUTING_GRID = (0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0)

# learn flags passed through to LearningConfig
SCHEDULE_FLAGS = (
    "epsilon_start",
    "epsilon_end",
    "decay_fraction",
    "lr_scale",
    "lr_exponent",
    "initial_q",
)


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _write_csv(out: Optional[str], header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with ExitStack() as stack:
        handle: IO[str] = (
            stack.enter_context(open(out, "w", newline="")) if out else sys.stdout
        )
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    if out:
        logger.info(f"Wrote {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sas", description="SAS-MDP solvers and experiments")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=LOG_LEVELS,
        default=None,
        help="Logging level (default: SAS_LOG_LEVEL or INFO)",
    )
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: SAS_SEED or 0)")
    # Subcommands take --seed too; theirs wins over the global flag.
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument(
        "--seed", dest="command_seed", type=int, default=None, help="Master seed"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve an instance file", parents=[seeded])
    solve.add_argument("--instance", required=True, help="Instance JSON file")
    solve.add_argument("--solver", choices=["vi", "pi", "lp", "embedded"], default="vi")
    solve.add_argument("--eps", type=float, default=None, help="Value-iteration precision")
    solve.add_argument("--tol", type=float, default=None, help="LP violation tolerance")
    solve.add_argument("--oracle", action="store_true", help="Cross-check with the embedded MDP")
    solve.add_argument("--out", default=None, help="Write the JSON report here")

    learn = sub.add_parser(
        "learn", help="Run SAS-Q-learning on an instance file", parents=[seeded]
    )
    learn.add_argument("--instance", required=True, help="Instance JSON file")
    learn.add_argument("--steps", type=int, default=200_000, help="Environment step budget")
    learn.add_argument("--horizon", type=int, default=100, help="Steps per episode")
    learn.add_argument("--epsilon-start", type=float, default=None, help="Initial ε (1.0)")
    learn.add_argument("--epsilon-end", type=float, default=None, help="Final ε (0.05)")
    learn.add_argument(
        "--decay-fraction", type=float, default=None, help="Share of episodes decaying ε (0.5)"
    )
    learn.add_argument("--lr-scale", type=float, default=None, help="Step-size numerator c (1.0)")
    learn.add_argument(
        "--lr-exponent", type=float, default=None, help="Step-size exponent ω in (0.5, 1] (0.6)"
    )
    learn.add_argument("--initial-q", type=float, default=None, help="Initial Q-values (0.0)")
    learn.add_argument("--out", default=None, help="Return-trace CSV (default: stdout)")
    learn.add_argument("--trajectory", default=None, help="Write every transition as JSON lines")

    curve = sub.add_parser(
        "curve", help="Value lost by ignoring availability, two-state example", parents=[seeded]
    )
    curve.add_argument("--p-grid", type=_float_list, default=list(DEFAULT_P_GRID))
    curve.add_argument("--gamma", type=float, default=0.9)
    curve.add_argument("--eps", type=float, default=1e-10)
    curve.add_argument("--out", default=None, help="CSV file (default: stdout)")

    routing = sub.add_parser(
        "routing", help="SAS-optimal vs oblivious routing costs", parents=[seeded]
    )
    routing.add_argument("--p-grid", type=_float_list, default=list(DEFAULT_ROUTING_GRID))
    routing.add_argument("--nodes", type=int, default=3, help="Columns per bank")
    routing.add_argument("--edge-avail", type=float, default=0.5)
    routing.add_argument("--noop-cost", type=float, default=1.0)
    routing.add_argument("--no-bridge", action="store_true", help="Remove the bridge")
    routing.add_argument("--out", default=None, help="CSV file (default: stdout)")
    return parser


def cmd_solve(args: argparse.Namespace, service: SolverService) -> int:
    instance = load_instance(args.instance)
    report = service.solve(
        instance, solver=args.solver, eps=args.eps, tol=args.tol, oracle=args.oracle
    )
    for state in report.states:
        print(f"{state.state}\tV={state.value:.6f}\tDL=[{', '.join(state.decision_list)}]")
    print(f"solver: {report.solver}")
    print(f"iterations: {report.iterations}")
    if report.constraints is not None:
        print(f"constraints: {report.constraints}")
    print(f"wall time: {report.wall_time:.3f}s")
    if report.oracle_max_diff is not None:
        print(f"oracle max |dV|: {report.oracle_max_diff:.3e}")
    if args.out:
        Path(args.out).write_text(report.model_dump_json(indent=2))
        logger.info(f"Wrote report to {args.out}")
    return EXIT_OK


def cmd_learn(args: argparse.Namespace, service: SolverService) -> int:
    instance = load_instance(args.instance)
    schedule = {
        name: getattr(args, name)
        for name in SCHEDULE_FLAGS
        if getattr(args, name) is not None
    }
    with ExitStack() as stack:
        recorder = (
            stack.enter_context(TrajectoryRecorder(args.trajectory)) if args.trajectory else None
        )
        report, result = service.learn(
            instance,
            steps=args.steps,
            horizon=args.horizon,
            recorder=recorder,
            schedule=schedule,
        )
    for s, dl in enumerate(report.decision_lists):
        print(f"{instance.mdp.state_name(s)}\tDL=[{', '.join(dl)}]", file=sys.stderr)
    rows = (
        (str(episode), _fmt(mean), _fmt(epsilon))
        for episode, (mean, epsilon) in enumerate(zip(result.mean_returns(), result.epsilons))
    )
    _write_csv(args.out, ["episode", "mean_return", "epsilon"], rows)
    return EXIT_OK


def cmd_example_curve(args: argparse.Namespace) -> int:
    points = two_state_curve(args.p_grid, gamma=args.gamma, eps=args.eps)
    rows = (
        (_fmt(pt.p), _fmt(pt.v_sas), _fmt(pt.v_naive), _fmt(pt.fraction_lost)) for pt in points
    )
    _write_csv(args.out, ["p", "V_sas", "V_naive", "fraction_lost"], rows)
    return EXIT_OK


def cmd_routing(args: argparse.Namespace, settings: SolverSettings) -> int:
    points = routing_comparison(
        args.p_grid,
        nodes=args.nodes,
        edge_avail=args.edge_avail,
        noop_cost=args.noop_cost,
        seed=settings.seed,
        bridge=not args.no_bridge,
    )
    rows = ((_fmt(pt.p), _fmt(pt.sas_cost), _fmt(pt.oblivious_cost)) for pt in points)
    _write_csv(args.out, ["p", "sas_cost", "oblivious_cost"], rows)
    return EXIT_OK


def _report_error(error: SasError) -> None:
    print(json.dumps(error.to_dict(), default=str), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``sas`` command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = SolverSettings.from_env()
        seed = args.command_seed if args.command_seed is not None else args.seed
        overrides = {"log_level": args.log_level, "seed": seed}
        settings = settings.model_copy(
            update={key: value for key, value in overrides.items() if value is not None}
        )
        if settings.seed < 0:
            raise ValueError(f"seed must be non-negative, got {settings.seed}")
    except (ValidationError, ValueError) as e:
        print(json.dumps({"error": "BadSettings", "message": str(e), "details": {}}), file=sys.stderr)
        return EXIT_INPUT
    configure_logging(settings.log_level)
    service = SolverService(settings)

    try:
        if args.command == "solve":
            return cmd_solve(args, service)
        if args.command == "learn":
            return cmd_learn(args, service)
        if args.command == "curve":
            return cmd_example_curve(args)
        return cmd_routing(args, settings)
    except CONVERGENCE_ERRORS as e:
        _report_error(e)
        return EXIT_NOT_CONVERGED
    except INPUT_ERRORS as e:
        _report_error(e)
        return EXIT_INPUT
    except SasError as e:
        _report_error(e)
        return EXIT_FAILURE
    except ValueError as e:
        print(json.dumps({"error": "BadInput", "message": str(e), "details": {}}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
