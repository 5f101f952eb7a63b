"""
bench: solve every instance file of a directory and write CSV reports.
"""
import argparse
from pathlib import Path

from infra.cli.commands import emit, fail, positive_int
from shared.config.constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from shared.config.settings import get_settings
from shared.logging.audit import log_artifact_written, log_run_event
from solvers.applications.benchmark import (
    benchmark,
    benchmark_csv,
    omit_timing,
    summarize_benchmark,
    summary_csv,
    write_csv,
)

MODELS = ("enhanced", "baseline")


def _models(text: str):
    models = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [m for m in models if m not in MODELS]
    if not models or unknown:
        raise argparse.ArgumentTypeError(f"models must be a comma-separated subset of {','.join(MODELS)}")
    return models


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="Benchmark a directory of instances")
    parser.add_argument("directory", help="Directory with *.json instance files")
    parser.add_argument("--models", type=_models, default=("enhanced",), help="enhanced, baseline or both")
    parser.add_argument("--workers", type=positive_int, default=None, help="Worker processes")
    parser.add_argument("--time-limit", type=float, default=None, help="Total seconds per solve")
    parser.add_argument("--output", default=None, help="Per-instance CSV path (stdout if absent)")
    parser.add_argument("--summary", default=None, help="Summary CSV path")
    parser.add_argument("--omit-timing", action="store_true", help="Leave wall times out of the CSV")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    directory = Path(args.directory)
    paths = sorted(str(p) for p in directory.glob("*.json")) if directory.is_dir() else []
    if not paths:
        return fail("bench", FileNotFoundError(f"no instance files in {directory}"), EXIT_USAGE)

    workers = args.workers or get_settings().bench_workers
    run_name = f"bench:{directory.name or directory}"
    log_run_event(run_name, "bench", "started", {"instances": len(paths), "models": list(args.models),
                                                  "workers": workers})
    overrides = {"total_time_limit": args.time_limit} if args.time_limit is not None else {}
    rows = benchmark(paths, models=args.models, workers=workers, overrides=overrides)
    summary = summarize_benchmark(rows)
    if args.omit_timing:
        rows = omit_timing(rows)
        summary = [s.model_copy(update={"avg_time_s": None}) for s in summary]

    text = benchmark_csv(rows)
    if args.output:
        log_artifact_written(str(write_csv(text, Path(args.output))), "csv", run_name)
    else:
        emit(text)
    if args.summary:
        log_artifact_written(str(write_csv(summary_csv(summary), Path(args.summary))), "csv", run_name)

    completed = sum(1 for row in rows if row.status != "error")
    log_run_event(run_name, "bench", "completed", {"rows": len(rows), "completed": completed})
    if completed == 0:
        return fail("bench", RuntimeError("no instance completed"), EXIT_FAILURE)
    return EXIT_OK
