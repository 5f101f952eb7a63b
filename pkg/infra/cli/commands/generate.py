"""
generate: write synthetic instance files for the featured applications.
"""
import argparse
from pathlib import Path
from typing import List

from pydantic import ValidationError

from infra.cli.commands import emit, fail, positive_int
from shared.config.constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from shared.errors import GaussMaxError
from shared.logging.audit import log_artifact_written, log_run_event
from shared.models.applications import KnapsackSpec, MakespanSpec
from solvers.applications.dfs import gen_dfs
from solvers.applications.knapsack import gen_knapsack
from solvers.applications.makespan import gen_makespan
from tools.instances.io import write_instance
from tools.instances.problem import ProblemInstance


def register(subparsers) -> None:
    parser = subparsers.add_parser("generate", help="Write synthetic instance files")
    families = parser.add_subparsers(dest="family", required=True)

    kp = families.add_parser("kp", help="Two knapsacks with correlated item values")
    kp.add_argument("--n", type=int, required=True, help="Number of items")
    kp.add_argument("--alpha", type=float, required=True, help="Covariance scale factor")
    kp.add_argument("--sense", choices=["max", "min"], default="max")

    ms = families.add_parser("ms", help="Two-machine makespan")
    ms.add_argument("--n", type=int, required=True, help="Number of jobs")
    ms.add_argument("--eta", type=float, required=True, help="Variance level")
    ms.add_argument("--uncorrelated", action="store_true", help="Independent processing times")

    dfs = families.add_parser("dfs", help="Two-entry showdown fantasy contest")
    dfs.add_argument("--players", type=int, required=True, help="Number of players before filtering")
    dfs.add_argument("--min-score", type=float, default=None, help="Drop players projected below this")

    for family in (kp, ms, dfs):
        family.add_argument("--seed", type=int, default=0, help="Seed of the first instance")
        family.add_argument("--count", type=positive_int, default=1, help="Instances with seeds seed..seed+count-1")
        family.add_argument("--out", default=".", help="Output directory")
        family.set_defaults(handler=run)


def _build(args: argparse.Namespace, seed: int) -> ProblemInstance:
    if args.family == "kp":
        return gen_knapsack(KnapsackSpec(n=args.n, alpha=args.alpha, seed=seed, sense=args.sense))
    if args.family == "ms":
        return gen_makespan(MakespanSpec(n=args.n, eta=args.eta, seed=seed, correlated=not args.uncorrelated))
    instance, _ = gen_dfs(args.players, seed, min_score_filter=args.min_score)
    return instance


def run(args: argparse.Namespace) -> int:
    run_name = f"generate:{args.family}"
    log_run_event(run_name, "generate", "started", {"seed": args.seed, "count": args.count, "out": args.out})
    written: List[str] = []
    try:
        for k in range(args.count):
            instance = _build(args, args.seed + k)
            path = write_instance(instance, Path(args.out) / f"{instance.label}.json")
            log_artifact_written(str(path), "instance", run_name)
            written.append(str(path))
    except ValidationError as e:
        log_run_event(run_name, "generate", "failed", {"error": str(e)})
        return fail("generate", e, EXIT_USAGE)
    except (GaussMaxError, OSError) as e:
        log_run_event(run_name, "generate", "failed", {"error": str(e)})
        return fail("generate", e, EXIT_FAILURE)

    emit("\n".join(written))
    log_run_event(run_name, "generate", "completed", {"files": len(written)})
    return EXIT_OK
