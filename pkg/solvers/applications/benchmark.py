"""
Benchmark harness: solve a set of instance files and tabulate the results.

Rows come back in input order (instance-major, then model) whatever the
number of workers.
"""
import csv
import io
import math
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from shared.errors import GaussMaxError
from shared.logging.logger import setup_logger, log_with_context
from shared.models.run import BenchmarkRow, BenchmarkSummaryRow, SolverConfig
from solvers.cutting_plane.solver import SolveStatus, resolve_config, solve
from tools.instances.io import read_instance

logger = setup_logger(__name__)

CSV_COLUMNS = ["family", "n", "param", "seed", "status", "time_s", "lb", "ub", "gap_pct", "iterations", "cuts", "model"]
SUMMARY_COLUMNS = ["family", "n", "param", "model", "instances", "solved", "avg_time_s", "avg_gap_pct", "avg_cuts"]

_SOLVED = (SolveStatus.OPTIMAL.value,)


def _run_one(task: Tuple[str, str, Dict]) -> BenchmarkRow:
    path, model, overrides = task
    try:
        instance = read_instance(path)
    except (GaussMaxError, OSError) as e:
        log_with_context(logger, "warning", "Benchmark instance unreadable", path=path, error=str(e))
        return BenchmarkRow(instance=path, n=0, status="error", model=model, error=str(e))

    try:
        config = resolve_config(instance, **{**overrides, "model": model})
        result = solve(instance, config)
    except GaussMaxError as e:
        log_with_context(logger, "warning", "Benchmark solve failed", path=path, model=model,
                         error=str(e), error_type=type(e).__name__)
        return BenchmarkRow(
            instance=path, family=instance.family, n=instance.n, param=instance.param,
            seed=instance.seed, status="error", model=model, error=str(e),
        )

    def finite(value: float) -> Optional[float]:
        return value if math.isfinite(value) else None

    gap = finite(result.gap)
    return BenchmarkRow(
        instance=path,
        family=instance.family,
        n=instance.n,
        param=instance.param,
        seed=instance.seed,
        status=result.status.value,
        time_s=result.wall_time,
        lb=finite(result.lb),
        ub=finite(result.ub),
        gap_pct=100.0 * gap if gap is not None else None,
        iterations=result.iterations,
        cuts=result.cuts_added,
        model=model,
    )


def benchmark(
    paths: Sequence[str],
    models: Sequence[str] = ("enhanced",),
    workers: int = 1,
    overrides: Optional[Dict] = None,
) -> List[BenchmarkRow]:
    """
    Solve every instance with every model.

    Args:
        paths: Instance files
        models: RMP flavours to run ("enhanced", "baseline")
        workers: Worker processes; 1 runs in the calling process
        overrides: SolverConfig fields applied on top of the family presets

    Returns:
        One row per (instance, model); failures have status "error"
    """
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(SolverConfig.model_fields)
    if unknown:
        raise ValueError(f"unknown solver options {sorted(unknown)}")
    tasks = [(str(path), model, overrides) for path in paths for model in models]
    log_with_context(logger, "info", "Benchmark started", instances=len(paths), models=list(models), workers=workers)

    if workers <= 1 or len(tasks) <= 1:
        rows = [_run_one(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, tasks))

    log_with_context(logger, "info", "Benchmark finished", rows=len(rows),
                     solved=sum(1 for r in rows if r.status in _SOLVED))
    return rows


def _mean(values: List[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def summarize_benchmark(rows: Iterable[BenchmarkRow]) -> List[BenchmarkSummaryRow]:
    """
    Aggregate rows per (family, n, param, model).

    Time and cuts are averaged over solved instances, the gap over
    instances that ended with a finite gap (solved ones count as 0).
    """
    groups: "OrderedDict[Tuple, List[BenchmarkRow]]" = OrderedDict()
    for row in rows:
        groups.setdefault((row.family, row.n, row.param, row.model), []).append(row)

    summary = []
    for (family, n, param, model), members in groups.items():
        solved = [r for r in members if r.status in _SOLVED]
        gaps = [0.0 if r.status in _SOLVED else r.gap_pct for r in members
                if r.status in _SOLVED or r.gap_pct is not None]
        summary.append(BenchmarkSummaryRow(
            family=family,
            n=n,
            param=param,
            model=model,
            instances=len(members),
            solved=len(solved),
            avg_time_s=_mean([r.time_s for r in solved if r.time_s is not None]),
            avg_gap_pct=_mean(gaps),
            avg_cuts=_mean([float(r.cuts) for r in solved]),
        ))
    return summary


def omit_timing(rows: Iterable[BenchmarkRow]) -> List[BenchmarkRow]:
    """Copies of the rows with wall times removed, for reproducible output."""
    return [row.model_copy(update={"time_s": None}) for row in rows]


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def benchmark_csv(rows: Iterable[BenchmarkRow]) -> str:
    """Per-instance CSV text with the CSV_COLUMNS header."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        data = row.model_dump()
        writer.writerow({column: _format(data[column]) for column in CSV_COLUMNS})
    return buffer.getvalue()


def summary_csv(summary: Iterable[BenchmarkSummaryRow]) -> str:
    """Summary CSV text with the SUMMARY_COLUMNS header."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in summary:
        data = row.model_dump()
        writer.writerow({column: _format(data[column]) for column in SUMMARY_COLUMNS})
    return buffer.getvalue()


def write_csv(text: str, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
