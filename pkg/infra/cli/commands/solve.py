"""
solve: run the cutting-plane solver on one instance file.
"""
import argparse
from pathlib import Path

from pydantic import ValidationError

from infra.cli.commands import emit, fail
from infra.cli.version import get_version
from shared.config.constants import EXIT_FAILURE, EXIT_INFEASIBLE, EXIT_OK, EXIT_TIME_LIMIT, EXIT_USAGE
from shared.config.settings import get_settings
from shared.errors import GaussMaxError, InstanceFormatError
from shared.logging.audit import log_artifact_written, log_run_event
from shared.models.run import RunConfig
from solvers.cutting_plane.solver import SolveStatus, resolve_config, solve
from tools.instances.io import read_instance
from tools.instances.problem import Sense
from tools.milp.client import BACKEND_NAMES, get_milp_backend

EXIT_CODES = {
    SolveStatus.OPTIMAL: EXIT_OK,
    SolveStatus.GAP_LIMIT: EXIT_OK,
    SolveStatus.TIME_LIMIT: EXIT_TIME_LIMIT,
    SolveStatus.INFEASIBLE: EXIT_INFEASIBLE,
}


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="Solve an instance file")
    parser.add_argument("instance", help="Instance JSON file")
    parser.add_argument("--d", type=int, default=None, help="Number of theta-squared intervals")
    parser.add_argument("--l", type=int, default=None, help="Number of delta intervals")
    parser.add_argument("--tolerance", type=float, default=None, help="Relative optimality gap")
    parser.add_argument("--gap-limit", type=float, default=None, help="Stop early once this gap is reached")
    parser.add_argument("--rmp-time-limit", type=float, default=None, help="Seconds per RMP solve")
    parser.add_argument("--bound-time-limit", type=float, default=None, help="Seconds per bounding solve")
    parser.add_argument("--heuristic-time-limit", type=float, default=None, help="Seconds for the primal heuristic")
    parser.add_argument("--time-limit", type=float, default=None, help="Total seconds")
    parser.add_argument("--backend", choices=BACKEND_NAMES, default=None, help="MILP backend")
    parser.add_argument("--baseline", action="store_true", help="Use the baseline RMP")
    parser.add_argument("--no-svi", action="store_true", help="Do not add supervalid inequalities")
    parser.add_argument("--no-heuristic", action="store_true", help="Skip the primal heuristic")
    parser.add_argument("--sense", choices=["max", "min"], default=None, help="Override the instance sense")
    parser.add_argument("--output", default=None, help="Also write the result record here")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    try:
        instance = read_instance(args.instance)
    except InstanceFormatError as e:
        return fail("solve", e, EXIT_USAGE)
    if args.sense:
        instance = instance.with_sense(Sense(args.sense))

    try:
        config = resolve_config(
            instance,
            d=args.d,
            l=args.l,
            tolerance=args.tolerance,
            gap_limit=args.gap_limit,
            rmp_time_limit=args.rmp_time_limit,
            bound_time_limit=args.bound_time_limit,
            heuristic_time_limit=args.heuristic_time_limit,
            total_time_limit=args.time_limit,
            backend=args.backend or get_settings().milp_backend,
            model="baseline" if args.baseline else None,
            svi=False if args.no_svi else None,
            heuristic=False if args.no_heuristic else None,
        )
        run_config = RunConfig(
            command="solve",
            instances=[args.instance],
            sense_override=args.sense,
            output=args.output,
            **config.model_dump(),
        )
    except ValidationError as e:
        return fail("solve", e, EXIT_USAGE)

    run_name = f"solve:{instance.label or Path(args.instance).stem}"
    log_run_event(run_name, "solve", "started", run_config.model_dump())
    try:
        result = solve(instance, config, get_milp_backend(config.backend))
    except GaussMaxError as e:
        log_run_event(run_name, "solve", "failed", {"error": str(e)})
        return fail("solve", e, EXIT_FAILURE)

    record = result.to_record(instance, args.instance, run_config, get_version())
    text = record.model_dump_json(indent=2)
    if args.output:
        target = Path(args.output)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text + "\n", encoding="utf-8")
        log_artifact_written(str(target), "result", run_name)
    emit(text)

    log_run_event(run_name, "solve", "completed", {
        "status": result.status.value,
        "objective": result.objective,
        "iterations": result.iterations,
        "wall_time": result.wall_time,
    })
    return EXIT_CODES[result.status]
