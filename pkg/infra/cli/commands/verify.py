"""
verify: run a named property suite and print its report.
"""
import argparse

from infra.cli.commands import emit, fail, positive_int
from shared.config.constants import EXIT_FAILURE, EXIT_OK
from shared.errors import GaussMaxError
from shared.logging.audit import log_run_event
from solvers.verification import SUITES, SuiteOptions, run_suite


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Run a property suite")
    parser.add_argument("suite", choices=sorted(SUITES), help="Suite name")
    parser.add_argument("--n", type=positive_int, default=None, help="Instance size (items, jobs or players)")
    parser.add_argument("--graphs", type=positive_int, default=None, help="Graphs in the mincut suite")
    parser.add_argument("--vertices", type=positive_int, default=None, help="Vertices per mincut graph")
    parser.add_argument("--instances", type=positive_int, default=None, help="Instances (or tuples) per suite")
    parser.add_argument("--seed", type=int, default=0, help="Base seed")
    parser.add_argument("--samples", type=positive_int, default=None, help="Monte-Carlo draws per instance")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    options = SuiteOptions(
        n=args.n,
        graphs=args.graphs,
        vertices=args.vertices,
        instances=args.instances,
        seed=args.seed,
        samples=args.samples,
    )
    run_name = f"verify:{args.suite}"
    log_run_event(run_name, "verify", "started", {"options": vars(options)})
    try:
        report = run_suite(args.suite, options)
    except GaussMaxError as e:
        log_run_event(run_name, "verify", "failed", {"error": str(e)})
        return fail("verify", e, EXIT_FAILURE)

    emit(report.model_dump_json(indent=2))
    log_run_event(run_name, "verify", "completed", {"passed": report.passed, "checks": report.checks})
    return EXIT_OK if report.passed else EXIT_FAILURE
